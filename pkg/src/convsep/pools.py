"""Finite candidate pools inside a body, and seeded instance families.

All randomness goes through numpy's counter-based Philox generator keyed by an
integer seed, so pools and instances regenerate identically from provenance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bodies import ConvexBody, Ellipsoid, HPolytope, LpBall, VPolytope, body_from_json
from .scalar import dump_number, is_exact, load_number, to_fraction

DEFAULT_DENOMINATOR = 64


def make_rng(seed: int) -> np.random.Generator:
    """The package RNG: Philox keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class CandidatePool:
    points: tuple
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(p) for p in self.points))

    def __len__(self):
        return len(self.points)

    def to_json(self):
        return {"provenance": self.provenance,
                "points": [[dump_number(v) for v in p] for p in self.points]}


def dedupe(points) -> tuple:
    """Drop repeated points, keeping first occurrences in order."""
    seen = set()
    out = []
    for p in points:
        key = tuple(p)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return tuple(out)


def _extent(body: ConvexBody, i: int):
    e = tuple(1 if k == i else 0 for k in range(body.dim))
    return body.support(e)


def grid_pool(body: ConvexBody, step, limit: int | None = None) -> CandidatePool:
    """Lattice points ``step * Z^n`` inside ``body``, in lexicographic order."""
    step = to_fraction(step)
    if step <= 0:
        raise ValueError("grid step must be positive")
    ranges = []
    for i in range(body.dim):
        ext = _extent(body, i)
        k = math.floor(Fraction(ext) / step) if is_exact(ext) else math.floor(float(ext) / float(step) + 1e-12)
        ranges.append(range(-k, k + 1))
    pts = []
    for idx in np.ndindex(*[len(r) for r in ranges]):
        x = tuple(step * r[j] for r, j in zip(ranges, idx))
        if body.contains(x, tol=0.0 if not body.exact else None):
            pts.append(x)
            if limit is not None and len(pts) > limit:
                raise ValueError(f"grid has more than {limit} points; use a coarser step")
    return CandidatePool(tuple(pts), {"kind": "grid", "step": dump_number(step)})


def sample_pool(body: ConvexBody, count: int, seed: int,
                denominator: int = DEFAULT_DENOMINATOR, max_tries: int = 100_000) -> CandidatePool:
    """``count`` distinct rational points of ``body`` by seeded rejection sampling."""
    rng = make_rng(seed)
    ext = [float(_extent(body, i)) for i in range(body.dim)]
    pts = []
    seen = set()
    tries = 0
    while len(pts) < count and tries < max_tries:
        tries += 1
        u = rng.uniform(-1.0, 1.0, body.dim)
        x = tuple(Fraction(round(ui * e * denominator), denominator) for ui, e in zip(u, ext))
        if x in seen:
            continue
        if body.contains(x, tol=0.0 if not body.exact else None):
            seen.add(x)
            pts.append(x)
    return CandidatePool(tuple(pts), {"kind": "sample", "count": count, "seed": seed,
                                      "denominator": denominator})


def pool_from_spec(spec: dict, body: ConvexBody) -> CandidatePool:
    kind = spec.get("kind", "grid")
    if kind == "grid":
        return grid_pool(body, spec.get("step", 1), spec.get("limit"))
    if kind == "sample":
        return sample_pool(body, int(spec["count"]), int(spec.get("seed", 0)),
                           int(spec.get("denominator", DEFAULT_DENOMINATOR)))
    if kind == "points":
        exact = spec.get("exact", True)
        pts = tuple(tuple(load_number(v, exact) for v in p) for p in spec["points"])
        return CandidatePool(pts, {"kind": "points",
                                   "points": [[dump_number(v) for v in p] for p in pts]})
    raise ValueError(f"unknown pool kind {kind!r}")


# -- instance families ----------------------------------------------------------

def _rational(rng, lo, hi, denominator=8):
    return Fraction(int(rng.integers(round(lo * denominator), round(hi * denominator) + 1)),
                    denominator)


def random_vpolytope(rng, dim: int, count: int | None = None, lo=-2, hi=2) -> VPolytope:
    count = count or dim + 1
    while True:
        verts = [tuple(_rational(rng, lo, hi) for _ in range(dim)) for _ in range(count)]
        try:
            return VPolytope(verts)
        except ValueError:
            continue


def random_hpolytope(rng, dim: int, count: int | None = None, lo=-2, hi=2) -> HPolytope:
    count = count or dim + 1
    while True:
        normals = [tuple(_rational(rng, lo, hi) for _ in range(dim)) for _ in range(count)]
        try:
            return HPolytope(normals)
        except ValueError:
            continue


def random_ellipsoid(rng, dim: int, axis_lo: float = 0.5, axis_hi: float = 2.0) -> Ellipsoid:
    axes = rng.uniform(axis_lo, axis_hi, dim)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    Q = q @ np.diag(1.0 / axes ** 2) @ q.T
    return Ellipsoid(tuple(map(tuple, Q)))


@dataclass(frozen=True)
class Instance:
    K: ConvexBody
    B: ConvexBody
    pool: CandidatePool
    provenance: dict

    def to_json(self):
        return {"K": self.K.to_json(), "B": self.B.to_json(), "pool": self.pool.provenance,
                "provenance": self.provenance}


FAMILIES = ("polytope", "hpolytope", "ellipsoid", "mixed", "interval", "lp")


def make_instance(family: str, dim: int, seed: int, pool_size: int = 10,
                  scale=None) -> Instance:
    """Deterministic instance ``(K, B, pool)`` from a named family.

    ``scale`` multiplies ``B`` (e.g. the ``c`` in ``M(K, c B)``).
    """
    rng = make_rng(seed)
    if family == "polytope":
        K = random_vpolytope(rng, dim, dim + 2)
        B = random_vpolytope(rng, dim, dim + 1, -1, 1)
    elif family == "hpolytope":
        K = random_hpolytope(rng, dim, dim + 2, -1, 1)
        B = random_hpolytope(rng, dim, dim + 1)
    elif family == "ellipsoid":
        K = random_ellipsoid(rng, dim, 1.0, 3.0)
        B = random_ellipsoid(rng, dim, 0.4, 1.2)
    elif family == "mixed":
        if int(rng.integers(2)):
            K = random_ellipsoid(rng, dim, 1.0, 3.0)
            B = random_vpolytope(rng, dim, dim + 1, -1, 1)
        else:
            K = random_vpolytope(rng, dim, dim + 2)
            B = random_ellipsoid(rng, dim, 0.4, 1.2)
    elif family == "interval":
        dim = 1
        K = HPolytope([(Fraction(1, int(rng.integers(1, 4))),)])
        B = HPolytope([(Fraction(int(rng.integers(1, 5)), 2),)])
    elif family == "lp":
        p = float(rng.choice([1.5, 2.0, 3.0]))
        K = LpBall(p, float(rng.uniform(1.5, 3.0)), dim)
        B = LpBall(p, 1.0, dim)
    else:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if scale is not None:
        B = B.scaled(scale)
    pool = sample_pool(K, pool_size, seed)
    prov = {"family": family, "dim": dim, "seed": seed, "pool_size": pool_size}
    if scale is not None:
        prov["scale"] = dump_number(scale)
    return Instance(K, B, pool, prov)
