"""Witness functionals for convex separation, and the certificate checkers.

A point ``x`` is B-convexly separated from earlier points ``x_1..x_k`` when
``(x + int B)`` misses ``conv{x_i}``. Equivalently some ``y`` in the polar of
``B`` has ``<y, x - x_i> >= 1`` for every ``i``. The largest achievable
``min_i <y, x - x_i>`` over ``y`` in the polar equals the gauge distance from
``x`` to the hull, and :func:`separation_margin` computes that pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from . import lp
from .bodies import (ConvexBody, DimensionError, Ellipsoid, HPolytope, LpBall,
                     VPolytope, _polytope_view, body_from_json)
from .scalar import (EPS, EXACT, FLOAT, all_exact, dot, dump_number, geq, is_exact,
                     leq, load_number, sub)

# float pre-screen: decisions further than this from the threshold skip the exact LP
SCREEN_BAND = 1e-6


class OracleError(RuntimeError):
    """The witness problem could not be solved (distinct from infeasibility)."""


def _check_dims(x, prior, B):
    n = B.dim
    if len(x) != n or any(len(p) != n for p in prior):
        raise DimensionError("points and body dimensions disagree")


def _polytope_margin(x, prior, B, exact):
    """Max-margin LP over the polar of a polytope ``B``; returns (margin, y)."""
    n = B.dim
    diffs = [sub(x, p) for p in prior]
    if isinstance(B, VPolytope):
        # polar is {y : |<s v, y>| <= 1}; variables y+, y-, t
        rows = [tuple(B.scale * c for c in v) for v in B.vertices]
        A, b = [], []
        for r in rows:
            A.append(list(r) + [-c for c in r] + [0])
            A.append([-c for c in r] + list(r) + [0])
            b.extend((1, 1))
        for d in diffs:
            A.append([-c for c in d] + list(d) + [1])
            b.append(0)
        c = [0] * (2 * n) + [1]
        try:
            value, z = lp.maximize(A, b, c, exact)
        except lp.LPError as exc:
            raise OracleError(str(exc)) from exc
        y = tuple(z[i] - z[n + i] for i in range(n))
        return value, y
    # HPolytope: polar is conv{+-a/s}; variables mu+, mu-, t
    gens = [tuple(c / B.scale for c in a) for a in B.normals]
    m = len(gens)
    A = [[1] * (2 * m) + [0]]
    b = [1]
    for d in diffs:
        proj = [dot(g, d) for g in gens]
        A.append([-v for v in proj] + proj + [1])
        b.append(0)
    c = [0] * (2 * m) + [1]
    try:
        value, z = lp.maximize(A, b, c, exact)
    except lp.LPError as exc:
        raise OracleError(str(exc)) from exc
    y = [0] * n
    for k, g in enumerate(gens):
        w = z[k] - z[m + k]
        if w:
            for i in range(n):
                y[i] += w * g[i]
    return value, tuple(y)


def _min_norm_point(P: np.ndarray, tol: float = 1e-13, max_iter: int = 500) -> np.ndarray:
    """Wolfe's algorithm: convex weights of the min-norm point of conv(rows of P)."""
    m = P.shape[0]
    scale2 = max(float(np.max(np.sum(P * P, axis=1))), 1e-300)
    first = int(np.argmin(np.sum(P * P, axis=1)))
    S = [first]
    lam = np.array([1.0])
    x = P[first].copy()
    for _ in range(max_iter):
        vals = P @ x
        j = int(np.argmin(vals))
        if vals[j] >= x @ x - tol * scale2 or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            Ps = P[S]
            k = len(S)
            M = np.zeros((k + 1, k + 1))
            M[:k, :k] = Ps @ Ps.T
            M[:k, k] = 1.0
            M[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
            alpha = sol[:k]
            if np.all(alpha > tol):
                lam = alpha
                x = alpha @ Ps
                break
            mask = alpha <= tol
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(mask, lam / (lam - alpha), np.inf)
            theta = float(min(1.0, np.min(ratios)))
            lam = lam + theta * (alpha - lam)
            keep = lam > tol
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ P[S]
    weights = np.zeros(m)
    weights[S] = lam
    return weights


def _smooth_margin(x, prior, B):
    """Gauge distance from ``x`` to ``conv(prior)`` for non-polyhedral ``B``."""
    xs = np.asarray([float(v) for v in x])
    P = np.asarray([[float(v) for v in p] for p in prior])
    if isinstance(B, Ellipsoid) or (isinstance(B, LpBall) and B.p == 2):
        if isinstance(B, Ellipsoid):
            L = np.linalg.cholesky(B._q)
            D = (xs - P) @ L / float(B.scale)
        else:
            D = (xs - P) / (float(B.scale) * float(B.r))
        weights = _min_norm_point(D)
    else:
        k = len(prior)

        def f(w):
            return float(B.gauge(tuple(xs - w @ P))) ** 2

        best = None
        for w0 in [np.full(k, 1.0 / k)] + [np.eye(k)[i] for i in range(min(k, 4))]:
            res = optimize.minimize(
                f, w0, method="SLSQP", bounds=[(0.0, 1.0)] * k,
                constraints=[{"type": "eq", "fun": lambda w: np.sum(w) - 1.0}],
                options={"ftol": 1e-16, "maxiter": 500})
            if best is None or res.fun < best.fun:
                best = res
        if best is None or not np.all(np.isfinite(best.x)):
            raise OracleError("smooth witness problem failed")
        weights = np.clip(best.x, 0.0, None)
        weights = weights / weights.sum()
    z = tuple(float(v) for v in xs - weights @ P)
    if not any(z):
        return 0.0, tuple(0.0 for _ in z)
    y = B.polar().support_point(z)
    # normalize into the polar exactly up to rounding
    s = float(B.support(y))
    if s > 0:
        y = tuple(v / max(s, 1.0) for v in y)
    margin = min(float(dot(y, sub(xs, p))) for p in P)
    return margin, y


def separation_margin(x, prior: Sequence, B: ConvexBody, exact: bool | None = None):
    """Best margin ``max_{y in B polar} min_i <y, x - x_i>`` and its maximizer.

    Exact (rational) whenever ``B`` is a polytope and all coordinates are
    rational, unless ``exact=False`` forces the float solver.
    """
    _check_dims(x, prior, B)
    n = B.dim
    if not prior:
        return math.inf, tuple(0 for _ in range(n))
    view = _polytope_view(B)
    if isinstance(view, (HPolytope, VPolytope)):
        if exact is None:
            exact = view.exact and all_exact(x) and all_exact(prior)
        return _polytope_margin(x, prior, view, exact)
    return _smooth_margin(x, prior, view)


def convex_separation_witness(x, prior: Sequence, B: ConvexBody) -> Optional[tuple]:
    """A functional ``y`` in the polar of ``B`` with ``<y, x - x_i> >= 1`` for all prior points.

    Returns None when ``(x + int B)`` meets ``conv(prior)``. With no prior
    points the constraints are vacuous and the zero functional is returned.
    """
    if not prior:
        _check_dims(x, prior, B)
        return tuple(0 for _ in range(B.dim))
    margin, y = separation_margin(x, prior, B)
    exact = is_exact(margin) and all_exact(y)
    return y if geq(margin, 1, exact) else None


def is_separated(x, prior: Sequence, B: ConvexBody) -> bool:
    """Decision version of :func:`convex_separation_witness`.

    For rational polytope data a float LP screens the instance first and the
    exact LP settles anything within ``SCREEN_BAND`` of the threshold.
    """
    if not prior:
        return True
    view = _polytope_view(B)
    if isinstance(view, (HPolytope, VPolytope)) and view.exact and all_exact(x) and all_exact(prior):
        m, _ = separation_margin(x, prior, view, exact=False)
        if abs(m - 1) > SCREEN_BAND:
            return m > 1
        m, _ = separation_margin(x, prior, view, exact=True)
        return m >= 1
    m, _ = separation_margin(x, prior, view)
    return geq(m, 1, is_exact(m))


# -- certificates --------------------------------------------------------------

@dataclass
class CheckReport:
    valid: bool
    backend: str
    worst: object = None
    binding: Optional[tuple] = None
    reason: str = ""

    def __bool__(self):
        return self.valid

    def to_json(self):
        return {"valid": self.valid, "backend": self.backend,
                "worst": None if self.worst is None else dump_number(self.worst),
                "binding": None if self.binding is None else list(self.binding),
                "reason": self.reason}


def _zero(n):
    return tuple(0 for _ in range(n))


@dataclass(frozen=True)
class ConvexSeparationCertificate:
    """Ordered points of ``K`` with witnesses in the polar of ``B``.

    ``witnesses[j]`` certifies ``points[j]`` against all earlier points; the
    first witness is the zero functional. Passing ``len(points) - 1`` witnesses
    prepends that zero.
    """

    K: ConvexBody
    B: ConvexBody
    points: tuple
    witnesses: tuple = ()

    def __post_init__(self):
        pts = tuple(tuple(p) for p in self.points)
        wit = tuple(tuple(w) for w in self.witnesses)
        if pts and len(wit) == len(pts) - 1:
            wit = (_zero(len(pts[0])),) + wit
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "witnesses", wit)

    def __len__(self):
        return len(self.points)

    @property
    def backend(self) -> str:
        ok = self.K.exact and self.B.exact and all_exact(self.points) and all_exact(self.witnesses)
        return EXACT if ok else FLOAT

    @property
    def margins(self) -> tuple:
        out = []
        for j in range(1, len(self.points)):
            y = self.witnesses[j]
            out.append(min(dot(y, sub(self.points[j], self.points[i])) for i in range(j)))
        return tuple(out)

    def with_witnesses(self) -> "ConvexSeparationCertificate":
        """Copy with witnesses regenerated by the oracle (None entries if infeasible)."""
        wit = [_zero(self.B.dim)] if self.points else []
        for j in range(1, len(self.points)):
            wit.append(convex_separation_witness(self.points[j], self.points[:j], self.B))
        if any(w is None for w in wit):
            raise OracleError("sequence is not convexly separated; no witnesses exist")
        return ConvexSeparationCertificate(self.K, self.B, self.points, tuple(wit))

    def to_json(self):
        return {"kind": "convex_separation", "backend": self.backend,
                "K": self.K.to_json(), "B": self.B.to_json(),
                "points": [[dump_number(v) for v in p] for p in self.points],
                "witnesses": [[dump_number(v) for v in w] for w in self.witnesses]}


def check_convex_separation(cert: ConvexSeparationCertificate) -> CheckReport:
    """Recompute every membership and margin condition of ``cert`` from scratch."""
    backend = cert.backend
    pts, wit = cert.points, cert.witnesses
    if len(pts) and len(wit) != len(pts):
        return CheckReport(False, backend, reason="witness count does not match point count")
    for j, x in enumerate(pts):
        g = cert.K.gauge(x)
        if not leq(g, 1, cert.K.exact and is_exact(g)):
            return CheckReport(False, backend, binding=(j,), reason=f"point {j} lies outside K")
    for j, y in enumerate(wit):
        s = cert.B.support(y)
        if not leq(s, 1, cert.B.exact and is_exact(s)):
            return CheckReport(False, backend, binding=(j,), reason=f"witness {j} lies outside the polar of B")
    worst = None
    binding = None
    for j in range(1, len(pts)):
        for i in range(j):
            m = dot(wit[j], sub(pts[j], pts[i]))
            if worst is None or m < worst:
                worst, binding = m, (i, j)
    if worst is not None and not geq(worst, 1, is_exact(worst)):
        return CheckReport(False, backend, worst, binding,
                           f"margin {float(worst):.6g} < 1 at pair {binding}")
    return CheckReport(True, backend, worst, binding)


@dataclass(frozen=True)
class SeparatedSetCertificate:
    """Points whose pairwise differences all have ``B``-gauge at least 1."""

    B: ConvexBody
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(p) for p in self.points))

    def __len__(self):
        return len(self.points)

    @property
    def backend(self):
        return EXACT if self.B.exact and all_exact(self.points) else FLOAT

    @property
    def d_min(self):
        best = None
        for j in range(len(self.points)):
            for i in range(j):
                g = self.B.gauge(sub(self.points[j], self.points[i]))
                if best is None or g < best:
                    best = g
        return best

    def to_json(self):
        return {"kind": "separated", "backend": self.backend, "B": self.B.to_json(),
                "points": [[dump_number(v) for v in p] for p in self.points]}


def check_separated(cert: SeparatedSetCertificate) -> CheckReport:
    backend = cert.backend
    worst, binding = None, None
    pts = cert.points
    for j in range(len(pts)):
        for i in range(j):
            g = cert.B.gauge(sub(pts[j], pts[i]))
            if worst is None or g < worst:
                worst, binding = g, (i, j)
    if worst is not None and not geq(worst, 1, backend == EXACT and is_exact(worst)):
        return CheckReport(False, backend, worst, binding,
                           f"points {binding} are at gauge distance {float(worst):.6g} < 1")
    return CheckReport(True, backend, worst, binding)


@dataclass(frozen=True)
class CoverCertificate:
    """Centers covering a finite pool: ``gauge_B(p - centers[assignment[k]]) <= 1``."""

    B: ConvexBody
    centers: tuple
    pool: tuple
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(tuple(c) for c in self.centers))
        object.__setattr__(self, "pool", tuple(tuple(p) for p in self.pool))
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    def __len__(self):
        return len(self.centers)

    @property
    def backend(self):
        return EXACT if self.B.exact and all_exact(self.centers) and all_exact(self.pool) else FLOAT

    def to_json(self):
        return {"kind": "cover", "backend": self.backend, "B": self.B.to_json(),
                "centers": [[dump_number(v) for v in c] for c in self.centers],
                "pool": [[dump_number(v) for v in p] for p in self.pool],
                "assignment": list(self.assignment)}


def check_cover(cert: CoverCertificate) -> CheckReport:
    backend = cert.backend
    if len(cert.assignment) != len(cert.pool):
        return CheckReport(False, backend, reason="assignment length does not match pool")
    worst, binding = None, None
    for k, (p, a) in enumerate(zip(cert.pool, cert.assignment)):
        if not 0 <= a < len(cert.centers):
            return CheckReport(False, backend, binding=(k,), reason=f"pool point {k} has no center")
        g = cert.B.gauge(sub(p, cert.centers[a]))
        if worst is None or g > worst:
            worst, binding = g, (k, a)
    if worst is not None and not leq(worst, 1, backend == EXACT and is_exact(worst)):
        return CheckReport(False, backend, worst, binding,
                           f"pool point {binding[0]} is at gauge {float(worst):.6g} from its center")
    return CheckReport(True, backend, worst, binding)


def check_certificate(cert) -> CheckReport:
    if isinstance(cert, ConvexSeparationCertificate):
        return check_convex_separation(cert)
    if isinstance(cert, SeparatedSetCertificate):
        return check_separated(cert)
    if isinstance(cert, CoverCertificate):
        return check_cover(cert)
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def certificate_from_json(d: dict):
    exact = d.get("backend", EXACT) == EXACT

    def pts(key):
        return tuple(tuple(load_number(v, exact) for v in p) for p in d.get(key, []))

    kind = d.get("kind")
    if kind == "convex_separation":
        return ConvexSeparationCertificate(body_from_json(d["K"]), body_from_json(d["B"]),
                                           pts("points"), pts("witnesses"))
    if kind == "separated":
        return SeparatedSetCertificate(body_from_json(d["B"]), pts("points"))
    if kind == "cover":
        return CoverCertificate(body_from_json(d["B"]), pts("centers"), pts("pool"),
                                tuple(d["assignment"]))
    raise ValueError(f"unknown certificate kind {kind!r}")
