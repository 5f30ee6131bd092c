"""Pool-relative counting: separated sets, convexly separated sequences, covers.

Every count here is over a finite :class:`~convsep.pools.CandidatePool`; the
reports carry the pool provenance so a number can always be regenerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import kernels
from .bodies import ConvexBody
from .oracle import (ConvexSeparationCertificate, CoverCertificate, OracleError,
                     SeparatedSetCertificate, check_certificate, is_separated,
                     separation_margin)
from .pools import CandidatePool, dedupe
from .scalar import EXACT, FLOAT, all_exact, dump_number, is_exact, sub

MHAT_CAP = 24
MSEP_CAP = 40
MTILDE_CAP = 20
COVER_CAP = 20

QUANTITIES = ("N", "M_sep", "Mhat", "Mtilde", "M")


class CapExceeded(ValueError):
    """An exact computation was forced on a pool above its size cap."""


@dataclass
class BoundReport:
    quantity: str
    lower: int
    upper: object
    method: str
    certificate: object = None
    instance: dict = field(default_factory=dict)
    backend: str = EXACT
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self):
        upper = "inf" if self.upper == math.inf else self.upper
        d = {"quantity": self.quantity, "lower": self.lower, "upper": upper,
             "method": self.method, "backend": self.backend, "instance": self.instance}
        if self.extra:
            d["extra"] = self.extra
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_json()
        return d


def _descriptor(pool: CandidatePool, B: ConvexBody, K: ConvexBody | None = None) -> dict:
    d = {}
    if K is not None:
        d["K"] = K.to_json()
    d["B"] = B.to_json()
    d["pool"] = pool.provenance
    d["pool_size"] = len(pool)
    return d


def _backend(B: ConvexBody, points, K: ConvexBody | None = None) -> str:
    ok = B.exact and all_exact(points) and (K is None or K.exact)
    return EXACT if ok else FLOAT


def _strictly_less(g, threshold) -> bool:
    if is_exact(g):
        return g < threshold
    return float(g) < float(threshold) - 1e-9


def conflict_graph(points, B: ConvexBody, threshold=1) -> list:
    """``adj[i]`` has bit ``j`` iff ``gauge_B(p_i - p_j) < threshold``."""
    n = len(points)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if _strictly_less(B.gauge(sub(points[i], points[j])), threshold):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _mis(adj, cand) -> int:
    if len(adj) > 64:
        from . import _kernels_py
        return _kernels_py.max_independent_set(adj, cand)
    return kernels.max_independent_set(adj, cand)


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _popcount(x):
    return bin(x).count("1")


# -- usual separation -------------------------------------------------------------

def greedy_separated(points, B: ConvexBody) -> tuple:
    """Indices of an inclusion-maximal B-separated subset, scanning in pool order."""
    chosen = []
    for i, p in enumerate(points):
        if all(not _strictly_less(B.gauge(sub(p, points[j])), 1) for j in chosen):
            chosen.append(i)
    return tuple(chosen)


def exact_separated_over_pool(pool: CandidatePool, B: ConvexBody, cap: int = MSEP_CAP,
                              force_exact: bool = False) -> BoundReport:
    """Largest B-separated subset of the pool (max independent set of the conflict graph)."""
    points = dedupe(pool.points)
    desc = _descriptor(pool, B)
    backend = _backend(B, points)
    if len(points) > cap:
        if force_exact:
            raise CapExceeded(f"pool of {len(points)} points exceeds separated-set cap {cap}")
        idx = greedy_separated(points, B)
        cert = SeparatedSetCertificate(B, [points[i] for i in idx])
        return BoundReport("M_sep", len(idx), len(points), "greedy", cert, desc, backend)
    adj = conflict_graph(points, B)
    mask = _mis(adj, (1 << len(points)) - 1)
    cert = SeparatedSetCertificate(B, [points[i] for i in _bits(mask)])
    return BoundReport("M_sep", len(cert), len(cert), "pool-exact", cert, desc, backend)


# -- convexly separated sequences -------------------------------------------------

def _exact_witnesses(order_points, K, B) -> ConvexSeparationCertificate:
    wit = [tuple(0 for _ in range(B.dim))]
    for j in range(1, len(order_points)):
        margin, y = separation_margin(order_points[j], order_points[:j], B)
        wit.append(y)
    cert = ConvexSeparationCertificate(K, B, order_points, tuple(wit))
    report = check_certificate(cert)
    if not report.valid:
        raise OracleError(f"constructed certificate failed its check: {report.reason}")
    return cert


class _SepCache:
    """Memoized ``is_separated(points[x], points[S])`` keyed by ``(x, mask)``."""

    def __init__(self, points, B):
        self.points = points
        self.B = B
        self.memo = {}
        self.calls = 0

    def __call__(self, x, mask):
        key = (x, mask)
        hit = self.memo.get(key)
        if hit is None:
            self.calls += 1
            prior = [self.points[i] for i in _bits(mask)]
            hit = is_separated(self.points[x], prior, self.B)
            self.memo[key] = hit
        return hit


def mhat_search(points, B: ConvexBody):
    """Longest B-convexly separated sequence of ``points``; returns the index order.

    Realizability of a set depends only on the set (the hull of the earlier
    points is order-free), so the search walks realizable subsets, each visited
    once, extending by points separated from the current hull. Extension
    candidates only shrink along a branch, and ``|S| + MIS(candidates)`` bounds
    every completion.
    """
    n = len(points)
    if n == 0:
        return (), 0
    adj = conflict_graph(points, B)
    full = (1 << n) - 1
    ceiling = _popcount(_mis(adj, full))
    sep = _SepCache(points, B)
    best = [1, (0,)]
    visited = set()

    def dfs(mask, order, cands):
        size = len(order)
        if size > best[0]:
            best[0], best[1] = size, tuple(order)
        if best[0] >= ceiling:
            return
        if size + _popcount(cands) <= best[0]:
            return
        if size + _popcount(_mis(adj, cands)) <= best[0]:
            return
        for x in _bits(cands):
            child = mask | (1 << x)
            if child in visited:
                continue
            visited.add(child)
            if not sep(x, mask):
                continue
            nxt = 0
            for z in _bits(cands & ~adj[x] & ~(1 << x)):
                if sep(z, child):
                    nxt |= 1 << z
            order.append(x)
            dfs(child, order, nxt)
            order.pop()
            if best[0] >= ceiling:
                return

    for start in range(n):
        if best[0] >= ceiling:
            break
        m = 1 << start
        visited.add(m)
        cands = 0
        for z in _bits(full & ~adj[start] & ~m):
            if sep(z, m):
                cands |= 1 << z
        dfs(m, [start], cands)
    return best[1], sep.calls


def greedy_mhat(points, B: ConvexBody) -> tuple:
    """Margin-greedy sequence: append the point with the largest margin (>= 1) to the hull."""
    if not points:
        return ()
    order = [0]
    remaining = list(range(1, len(points)))
    while remaining:
        prior = [points[i] for i in order]
        best = None
        for i in remaining:
            m, _ = separation_margin(points[i], prior, B)
            if best is None or m > best[0]:
                best = (m, i)
        exact = is_exact(best[0])
        if not (best[0] >= 1 if exact else best[0] >= 1 - 1e-9):
            break
        order.append(best[1])
        remaining.remove(best[1])
    return tuple(order)


def exact_mhat_over_pool(pool: CandidatePool, K: ConvexBody, B: ConvexBody,
                         cap: int = MHAT_CAP, force_exact: bool = False) -> BoundReport:
    """Longest B-convexly separated sequence of pool points, with a witnessed certificate."""
    points = dedupe(pool.points)
    desc = _descriptor(pool, B, K)
    backend = _backend(B, points, K)
    if not points:
        return BoundReport("Mhat", 0, 0, "pool-exact", None, desc, backend)
    outside = [p for p in points if not K.contains(p)]
    if outside:
        raise ValueError(f"pool point {outside[0]} lies outside K")
    if len(points) > cap:
        if force_exact:
            raise CapExceeded(f"pool of {len(points)} points exceeds convex-separation cap {cap}")
        order = greedy_mhat(points, B)
        cert = _exact_witnesses([points[i] for i in order], K, B)
        upper = exact_separated_over_pool(CandidatePool(points), B).upper
        return BoundReport("Mhat", len(cert), upper, "greedy", cert, desc, cert.backend)
    order, calls = mhat_search(points, B)
    cert = _exact_witnesses([points[i] for i in order], K, B)
    return BoundReport("Mhat", len(cert), len(cert), "pool-exact", cert, desc, cert.backend,
                       {"oracle_calls": calls})


# -- set-condition variant ------------------------------------------------------------

def mtilde_search(points, B: ConvexBody) -> tuple:
    """Largest subset where every point is separated from the hull of all the others.

    The admissible family is closed under taking subsets, so subsets are
    enumerated in increasing index order with candidate lists that only shrink.
    """
    n = len(points)
    if n == 0:
        return ()
    adj = conflict_graph(points, B)
    ceiling = _popcount(_mis(adj, (1 << n) - 1))
    sep = _SepCache(points, B)
    best = [1, (0,)]

    def admissible(mask):
        return all(sep(i, mask & ~(1 << i)) for i in _bits(mask))

    def dfs(members, mask, cands):
        if len(members) > best[0]:
            best[0], best[1] = len(members), tuple(members)
        if best[0] >= ceiling or len(members) + _popcount(cands) <= best[0]:
            return
        if len(members) + _popcount(_mis(adj, cands)) <= best[0]:
            return
        for x in _bits(cands):
            child = mask | (1 << x)
            later = cands & ~((1 << (x + 1)) - 1) & ~adj[x]
            nxt = 0
            for z in _bits(later):
                if admissible(child | (1 << z)):
                    nxt |= 1 << z
            members.append(x)
            dfs(members, child, nxt)
            members.pop()
            if best[0] >= ceiling:
                return

    full = (1 << n) - 1
    for start in range(n):
        m = 1 << start
        later = full & ~((1 << (start + 1)) - 1) & ~adj[start]
        cands = 0
        for z in _bits(later):
            if admissible(m | (1 << z)):
                cands |= 1 << z
        dfs([start], m, cands)
        if best[0] >= ceiling:
            break
    return best[1]


def exact_mtilde_over_pool(pool: CandidatePool, B: ConvexBody, cap: int = MTILDE_CAP,
                           force_exact: bool = False) -> BoundReport:
    """Largest subset whose every point is B-separated from the hull of the rest."""
    points = dedupe(pool.points)
    desc = _descriptor(pool, B)
    backend = _backend(B, points)
    if not points:
        return BoundReport("Mtilde", 0, 0, "exhaustive", None, desc, backend)
    if len(points) > cap:
        if force_exact:
            raise CapExceeded(f"pool of {len(points)} points exceeds set-condition cap {cap}")
        chosen = [0]
        for i in range(1, len(points)):
            trial = chosen + [i]
            pts = [points[k] for k in trial]
            if all(is_separated(pts[a], pts[:a] + pts[a + 1:], B) for a in range(len(pts))):
                chosen = trial
        cert = SeparatedSetCertificate(B, [points[i] for i in chosen])
        upper = exact_separated_over_pool(CandidatePool(points), B).upper
        return BoundReport("Mtilde", len(chosen), upper, "greedy", cert, desc, backend)
    idx = mtilde_search(points, B)
    cert = SeparatedSetCertificate(B, [points[i] for i in idx])
    return BoundReport("Mtilde", len(idx), len(idx), "exhaustive", cert, desc, backend,
                       {"members": list(idx)})


def mtilde_admissible(points, B: ConvexBody) -> bool:
    pts = list(points)
    return all(is_separated(pts[a], pts[:a] + pts[a + 1:], B) for a in range(len(pts)))


# -- covering ---------------------------------------------------------------------------

def _cover_masks(points, B):
    n = len(points)
    masks = [0] * n
    for c in range(n):
        for p in range(n):
            g = B.gauge(sub(points[p], points[c]))
            inside = g <= 1 if is_exact(g) else float(g) <= 1 + 1e-9
            if inside:
                masks[c] |= 1 << p
    return masks


def _cover_certificate(points, B, centers_idx, masks):
    assignment = []
    for p in range(len(points)):
        for k, c in enumerate(centers_idx):
            if masks[c] >> p & 1:
                assignment.append(k)
                break
    return CoverCertificate(B, [points[c] for c in centers_idx], points, assignment)


def greedy_cover_indices(points, B, masks=None) -> tuple:
    masks = masks or _cover_masks(points, B)
    uncovered = (1 << len(points)) - 1
    chosen = []
    while uncovered:
        c = max(range(len(points)), key=lambda i: (_popcount(masks[i] & uncovered), -i))
        chosen.append(c)
        uncovered &= ~masks[c]
    return tuple(chosen)


def greedy_cover(pool: CandidatePool, B: ConvexBody, cap: int = COVER_CAP) -> BoundReport:
    """Pool-relative covering number ``N`` by translates of ``B`` centred at pool points.

    Greedy picks the center covering most uncovered points (lowest index on
    ties). Pools up to ``cap`` points are also solved exactly by set-cover
    enumeration. The lower bound for larger pools is the size of a set with
    pairwise gauge distance above 2, no two of which can share a center.
    """
    points = dedupe(pool.points)
    desc = _descriptor(pool, B)
    backend = _backend(B, points)
    if not points:
        raise ValueError("greedy_cover needs a nonempty pool")
    masks = _cover_masks(points, B)
    greedy = greedy_cover_indices(points, B, masks)
    extra = {"greedy": len(greedy)}
    if len(points) <= cap:
        chosen = kernels.min_set_cover(masks, (1 << len(points)) - 1)
        idx = tuple(_bits(chosen))
        cert = _cover_certificate(points, B, idx, masks)
        return BoundReport("N", len(idx), len(idx), "exhaustive", cert, desc, backend, extra)
    far = [0] * len(points)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            g = B.gauge(sub(points[i], points[j]))
            if not (g > 2 if is_exact(g) else float(g) > 2 + 1e-9):
                far[i] |= 1 << j
                far[j] |= 1 << i
    lower = _popcount(_mis(far, (1 << len(points)) - 1)) if len(points) <= MSEP_CAP else 1
    cert = _cover_certificate(points, B, greedy, masks)
    return BoundReport("N", lower, len(greedy), "greedy", cert, desc, backend, extra)


def cover_from_separated(points, B: ConvexBody) -> CoverCertificate:
    """Cover certificate from an inclusion-maximal separated subset (scan order)."""
    points = dedupe(points)
    idx = greedy_separated(points, B)
    masks = _cover_masks(points, B)
    return _cover_certificate(points, B, idx, masks)


def packing_from_separated(report: Optional[BoundReport], B: ConvexBody) -> Optional[BoundReport]:
    """Relabel ``M_sep(K, B)`` as the packing number ``M(K, B/2)``.

    For symmetric ``B`` two translates ``x + B/2`` and ``y + B/2`` have disjoint
    interiors exactly when ``gauge_B(x - y) >= 1``.
    """
    if report is None:
        return None
    if report.quantity != "M_sep":
        raise ValueError("packing_from_separated needs an M_sep report")
    half = B.scaled(Fraction(1, 2) if B.exact else 0.5)
    inst = dict(report.instance)
    inst["B"] = half.to_json()
    extra = dict(report.extra)
    extra["from"] = "M_sep"
    return BoundReport("M", report.lower, report.upper, report.method, report.certificate,
                       inst, report.backend, extra)
