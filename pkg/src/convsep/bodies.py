"""Symmetric convex bodies with gauge/support/polar operations and the radius of K in B.

Four representations are supported, each with an optional positive ``scale``
(the body is ``scale * base``):

* :class:`HPolytope` -- ``{x : |<a_k, x>| <= 1}`` for stored normals ``a_k``
* :class:`VPolytope` -- ``conv{+-v_i}`` for stored vertices ``v_i``
* :class:`Ellipsoid` -- ``{x : x^T Q x <= 1}``
* :class:`LpBall` -- ``{x : ||x||_p <= r}`` in ``R^dim``

Both polytope forms are symmetrized implicitly and hold rational coordinates,
so their gauges and support values are exact. Ellipsoids and l_p balls with
``1 < p < inf`` are evaluated in floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import linalg, optimize

from . import lp
from .scalar import (EXACT, FLOAT, all_exact, dot, is_exact, load_number, neg,
                     rank, smul, solve, to_float, to_fraction, dump_number)

MAX_DIM = 8


class DimensionError(ValueError):
    """Point and body dimensions disagree, or dimension exceeds the cap."""


class DegenerateBodyError(ValueError):
    """The data does not describe a bounded body with nonempty interior."""


def _check_dim(n: int) -> None:
    if not 1 <= n <= MAX_DIM:
        raise DimensionError(f"dimension {n} outside 1..{MAX_DIM}")


def _scale_value(t):
    if is_exact(t):
        t = Fraction(t)
    else:
        t = float(t)
    if not t > 0:
        raise ValueError(f"scale must be positive, got {t}")
    return t


def _exact_rows(rows):
    out = tuple(tuple(to_fraction(v) for v in r) for r in rows)
    if not out:
        raise DegenerateBodyError("no generators given")
    n = len(out[0])
    if any(len(r) != n for r in out):
        raise DimensionError("ragged generator list")
    return out


def _dedupe_symmetric(rows):
    seen = set()
    out = []
    for r in rows:
        if all(v == 0 for v in r):
            continue
        if r in seen or neg(r) in seen:
            continue
        seen.add(r)
        out.append(r)
    return tuple(out)


class ConvexBody:
    """Common interface. Subclasses provide the unscaled ``_gauge``/``_support``."""

    scale: object

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def exact(self) -> bool:
        raise NotImplementedError

    @property
    def backend(self) -> str:
        return EXACT if self.exact else FLOAT

    @property
    def degenerate(self) -> bool:
        """True for a slab/cylinder (unbounded) or a flat polytope (empty interior)."""
        return getattr(self, "_rank", self.dim) < self.dim

    def _check_point(self, x) -> None:
        if len(x) != self.dim:
            raise DimensionError(f"point of dimension {len(x)} for body of dimension {self.dim}")

    def gauge(self, x):
        """Minkowski functional ``inf{t > 0 : x in t * body}``."""
        self._check_point(x)
        return self._gauge(x) / self.scale

    def support(self, u):
        """``max <u, x>`` over the body."""
        self._check_point(u)
        return self._support(u) * self.scale

    def support_point(self, u) -> tuple:
        """A point of the body attaining :meth:`support` in direction ``u``."""
        self._check_point(u)
        return smul(self.scale, self._support_point(u))

    def contains(self, x, tol: float | None = None) -> bool:
        g = self.gauge(x)
        if self.exact and is_exact(g) and tol is None:
            return g <= 1
        return float(g) <= 1 + (1e-9 if tol is None else tol)

    def scaled(self, t) -> "ConvexBody":
        return self._with_scale(self.scale * _scale_value(t))

    def polar(self) -> "ConvexBody":
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    # subclasses
    def _gauge(self, x):
        raise NotImplementedError

    def _support(self, u):
        raise NotImplementedError

    def _support_point(self, u):
        raise NotImplementedError

    def _with_scale(self, s):
        raise NotImplementedError


def _free_lp_support(rows, u):
    """max <u, x> s.t. |<r, x>| <= 1 for r in rows; returns (value, x).

    The value is ``inf`` (and ``x`` None) when the rows do not span ``u``.
    """
    n = len(u)
    A = []
    b = []
    for r in rows:
        A.append(list(r) + [-v for v in r])
        A.append([-v for v in r] + list(r))
        b.extend((1, 1))
    c = list(u) + [-v for v in u]
    try:
        value, z = lp.maximize(A, b, c)
    except lp.LPError:
        return math.inf, None
    x = tuple(z[i] - z[n + i] for i in range(n))
    return value, x


@dataclass(frozen=True, eq=True)
class HPolytope(ConvexBody):
    normals: tuple
    scale: object = 1

    def __post_init__(self):
        rows = _dedupe_symmetric(_exact_rows(self.normals))
        object.__setattr__(self, "normals", rows)
        object.__setattr__(self, "scale", _scale_value(self.scale))
        if not rows:
            raise DegenerateBodyError("all normals are zero")
        _check_dim(len(rows[0]))
        object.__setattr__(self, "_rank", rank(rows))

    @property
    def dim(self):
        return len(self.normals[0])

    @property
    def exact(self):
        return is_exact(self.scale)

    def _gauge(self, x):
        return max(abs(dot(a, x)) for a in self.normals)

    def _support(self, u):
        return _free_lp_support(self.normals, u)[0]

    def _support_point(self, u):
        x = _free_lp_support(self.normals, u)[1]
        if x is None:
            raise DegenerateBodyError("support is infinite in this direction")
        return x

    @cached_property
    def vertices(self) -> tuple:
        """Vertices of the unscaled polytope, one of each antipodal pair."""
        if self.degenerate:
            raise DegenerateBodyError("unbounded polyhedron has no vertex description")
        n = self.dim
        found = []
        seen = set()
        for idx in itertools.combinations(range(len(self.normals)), n):
            rows = [self.normals[i] for i in idx]
            for signs in itertools.product((1, -1), repeat=n - 1):
                rhs = (1,) + signs
                x = solve(rows, rhs)
                if x is None:
                    break
                if x in seen or neg(x) in seen:
                    continue
                if all(abs(dot(a, x)) <= 1 for a in self.normals):
                    seen.add(x)
                    found.append(x)
        return tuple(found)

    def polar(self):
        return VPolytope(self.normals, 1 / self.scale)

    def _with_scale(self, s):
        return HPolytope(self.normals, s)

    def to_json(self):
        d = {"type": "hpolytope", "normals": [[dump_number(v) for v in r] for r in self.normals]}
        if self.scale != 1:
            d["scale"] = dump_number(self.scale)
        return d


@dataclass(frozen=True, eq=True)
class VPolytope(ConvexBody):
    vertices: tuple
    scale: object = 1

    def __post_init__(self):
        rows = _dedupe_symmetric(_exact_rows(self.vertices))
        object.__setattr__(self, "vertices", rows)
        object.__setattr__(self, "scale", _scale_value(self.scale))
        if not rows:
            raise DegenerateBodyError("all vertices are zero")
        _check_dim(len(rows[0]))
        object.__setattr__(self, "_rank", rank(rows))

    @property
    def dim(self):
        return len(self.vertices[0])

    @property
    def exact(self):
        return is_exact(self.scale)

    @property
    def generators(self) -> tuple:
        """All ``+-v`` at the body's scale."""
        out = []
        for v in self.vertices:
            out.append(smul(self.scale, v))
            out.append(smul(self.scale, neg(v)))
        return tuple(out)

    def _gauge(self, x):
        return _free_lp_support(self.vertices, x)[0]

    def _support(self, u):
        return max(abs(dot(v, u)) for v in self.vertices)

    def _support_point(self, u):
        best = max(self.vertices, key=lambda v: abs(dot(v, u)))
        return best if dot(best, u) >= 0 else neg(best)

    def polar(self):
        return HPolytope(self.vertices, 1 / self.scale)

    def _with_scale(self, s):
        return VPolytope(self.vertices, s)

    def to_json(self):
        d = {"type": "vpolytope", "vertices": [[dump_number(v) for v in r] for r in self.vertices]}
        if self.scale != 1:
            d["scale"] = dump_number(self.scale)
        return d


@dataclass(frozen=True, eq=True)
class Ellipsoid(ConvexBody):
    Q: tuple
    scale: object = 1

    def __post_init__(self):
        q = np.asarray([[to_float(v) for v in row] for row in self.Q], dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DimensionError("Q must be square")
        _check_dim(q.shape[0])
        if not np.allclose(q, q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(q).max())):
            raise DegenerateBodyError("Q must be symmetric")
        q = (q + q.T) / 2
        try:
            np.linalg.cholesky(q)
        except np.linalg.LinAlgError:
            raise DegenerateBodyError("Q must be positive definite") from None
        object.__setattr__(self, "Q", tuple(tuple(float(v) for v in row) for row in q))
        object.__setattr__(self, "scale", _scale_value(self.scale))

    @cached_property
    def _q(self):
        return np.asarray(self.Q)

    @cached_property
    def _qinv(self):
        inv = np.linalg.inv(self._q)
        return (inv + inv.T) / 2

    @property
    def dim(self):
        return len(self.Q)

    @property
    def exact(self):
        return False

    def _gauge(self, x):
        x = np.asarray([float(v) for v in x])
        return float(math.sqrt(max(float(x @ self._q @ x), 0.0)))

    def _support(self, u):
        u = np.asarray([float(v) for v in u])
        return float(math.sqrt(max(float(u @ self._qinv @ u), 0.0)))

    def _support_point(self, u):
        u = np.asarray([float(v) for v in u])
        w = self._qinv @ u
        s = math.sqrt(max(float(u @ w), 0.0))
        if s == 0:
            return tuple(0.0 for _ in u)
        return tuple(float(v) for v in w / s)

    def polar(self):
        return Ellipsoid(tuple(map(tuple, self._qinv)), 1 / self.scale)

    def _with_scale(self, s):
        return Ellipsoid(self.Q, s)

    def to_json(self):
        d = {"type": "ellipsoid", "Q": [list(r) for r in self.Q]}
        if self.scale != 1:
            d["scale"] = dump_number(self.scale)
        return d


def _conjugate(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def _pnorm(x, p):
    if math.isinf(p):
        return max(abs(v) for v in x)
    if p == 1:
        return sum(abs(v) for v in x)
    return float(sum(abs(float(v)) ** p for v in x) ** (1 / p))


@dataclass(frozen=True, eq=True)
class LpBall(ConvexBody):
    p: float
    r: object = 1
    n: int = 2
    scale: object = 1

    def __post_init__(self):
        p = to_float(self.p)
        if not p >= 1:
            raise ValueError(f"p must lie in [1, inf], got {p}")
        object.__setattr__(self, "p", p)
        _check_dim(int(self.n))
        object.__setattr__(self, "n", int(self.n))
        polyhedral = p == 1 or math.isinf(p)
        r = self.r
        if polyhedral and (is_exact(r) or isinstance(r, str)):
            r = to_fraction(r)
        else:
            r = to_float(r)
        if not r > 0:
            raise DegenerateBodyError("radius must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "scale", _scale_value(self.scale))

    @property
    def dim(self):
        return self.n

    @property
    def polyhedral(self) -> bool:
        return self.p == 1 or math.isinf(self.p)

    @property
    def exact(self):
        return self.polyhedral and is_exact(self.r) and is_exact(self.scale)

    def as_polytope(self) -> ConvexBody:
        """Equivalent polytope for ``p`` in ``{1, inf}``."""
        if not self.polyhedral:
            raise ValueError("only p = 1 and p = inf balls are polytopes")
        eye = [tuple(1 if i == j else 0 for j in range(self.n)) for i in range(self.n)]
        if self.p == 1:
            return VPolytope(eye, self.scale * self.r)
        return HPolytope(eye, self.scale * self.r)

    def _gauge(self, x):
        return _pnorm(x, self.p) / self.r

    def _support(self, u):
        return _pnorm(u, _conjugate(self.p)) * self.r

    def _support_point(self, u):
        p = self.p
        if self.polyhedral:
            return self.as_polytope()._support_point(u) if self.p == 1 else tuple(
                self.r * (1 if v >= 0 else -1) for v in u)
        q = _conjugate(p)
        norm = _pnorm(u, q)
        if norm == 0:
            return tuple(0.0 for _ in u)
        return tuple(self.r * math.copysign(abs(float(v)) ** (q - 1), v) / norm ** (q - 1)
                     for v in u)

    def polar(self):
        return LpBall(_conjugate(self.p), 1 / self.r, self.n, 1 / self.scale)

    def _with_scale(self, s):
        return LpBall(self.p, self.r, self.n, s)

    def to_json(self):
        d = {"type": "lpball", "p": "inf" if math.isinf(self.p) else self.p,
             "r": dump_number(self.r), "dim": self.n}
        if self.scale != 1:
            d["scale"] = dump_number(self.scale)
        return d


def _polytope_view(body: ConvexBody) -> ConvexBody:
    if isinstance(body, LpBall) and body.polyhedral:
        return body.as_polytope()
    return body


# -- module-level operations -------------------------------------------------

def gauge(body: ConvexBody, x):
    return body.gauge(x)


def support(body: ConvexBody, u):
    return body.support(u)


def polar(body: ConvexBody) -> ConvexBody:
    return body.polar()


@dataclass(frozen=True)
class RadiusResult:
    """``value = max over K of gauge_B``; ``point`` attains it.

    ``closed_form`` is False when the value came from local numerical
    maximization and is therefore only a lower bound.
    """

    value: object
    point: tuple
    closed_form: bool = True
    method: str = field(default="closed-form")


def radius_witness(K: ConvexBody, B: ConvexBody) -> RadiusResult:
    if K.dim != B.dim:
        raise DimensionError("K and B live in different dimensions")
    K = _polytope_view(K)
    B = _polytope_view(B)
    if K.degenerate and isinstance(K, HPolytope):
        raise DegenerateBodyError("K is unbounded")

    def best_over(points):
        best = None
        for x in points:
            g = B.gauge(x)
            if best is None or g > best[0]:
                best = (g, tuple(x))
        if best[0] == math.inf:
            raise DegenerateBodyError("K is not contained in any multiple of B")
        return RadiusResult(best[0], best[1])

    if isinstance(K, VPolytope):
        return best_over(smul(K.scale, v) for v in K.vertices)
    if isinstance(B, HPolytope):
        best = None
        for a in B.normals:
            s = K.support(a)
            if best is None or s > best[0]:
                best = (s, a)
        if best[0] == math.inf:
            raise DegenerateBodyError("K is not contained in any multiple of B")
        return RadiusResult(best[0] / B.scale, K.support_point(best[1]))
    if isinstance(K, HPolytope):
        return best_over(smul(K.scale, v) for v in K.vertices)
    if isinstance(B, VPolytope):
        if B.degenerate:
            raise DegenerateBodyError("B has empty interior; the radius is infinite")
        dual = B.polar()
        best = None
        for u in dual.vertices:
            u = smul(dual.scale, u)
            s = K.support(u)
            if best is None or s > best[0]:
                best = (s, u)
        return RadiusResult(best[0], K.support_point(best[1]))
    if isinstance(K, Ellipsoid) and isinstance(B, Ellipsoid):
        w, v = linalg.eigh(B._q, K._q)
        top = v[:, -1]
        top = top / math.sqrt(float(top @ K._q @ top))
        value = float(K.scale) / float(B.scale) * math.sqrt(max(w[-1], 0.0))
        return RadiusResult(value, tuple(float(K.scale) * float(c) for c in top))
    if isinstance(K, LpBall) and isinstance(B, LpBall):
        n = K.n
        factor = 1.0 if B.p >= K.p else n ** (1 / B.p - 1 / K.p)
        size = float(K.scale) * float(K.r)
        value = size / (float(B.scale) * float(B.r)) * factor
        if B.p >= K.p:
            x = (size,) + (0.0,) * (n - 1)
        else:
            x = tuple(size * n ** (-1 / K.p) for _ in range(n))
        return RadiusResult(value, x)
    return _numeric_radius(K, B)


def _numeric_radius(K: ConvexBody, B: ConvexBody, starts: int = 24, seed: int = 0):
    """Maximize gauge_B over support points of K from several seeded starts."""
    rng = np.random.Generator(np.random.Philox(seed))
    n = K.dim

    def neg_obj(u):
        if not np.any(u):
            return 0.0
        return -float(B.gauge(K.support_point(tuple(u))))

    best_val, best_u = -1.0, None
    dirs = list(np.eye(n)) + list(rng.standard_normal((starts, n)))
    for u0 in dirs:
        res = optimize.minimize(neg_obj, u0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        if -res.fun > best_val:
            best_val, best_u = -res.fun, res.x
    x = K.support_point(tuple(best_u))
    return RadiusResult(float(B.gauge(x)), tuple(float(v) for v in x), False, "local-search")


def radius(K: ConvexBody, B: ConvexBody):
    """``R = sup{gauge_B(x) : x in K}``."""
    return radius_witness(K, B).value


def body_from_json(d: dict, exact: bool | None = None) -> ConvexBody:
    """Parse a JSON body descriptor.

    ``exact=True`` rejects bodies that cannot be handled in rational arithmetic.
    """
    kind = d.get("type")
    scale = d.get("scale", 1)
    if kind in ("hpolytope", "vpolytope"):
        scale = to_fraction(scale)
    elif isinstance(scale, str):
        scale = to_fraction(scale) if "/" in scale else to_float(scale)
    if kind == "hpolytope":
        body = HPolytope(d["normals"], scale)
    elif kind == "vpolytope":
        body = VPolytope(d["vertices"], scale)
    elif kind == "ellipsoid":
        body = Ellipsoid(d["Q"], scale)
    elif kind == "lpball":
        p = to_float(d.get("p", 2.0))
        r = d.get("r", 1)
        polyhedral = p == 1 or math.isinf(p)
        if polyhedral and not isinstance(r, float):
            r = to_fraction(r)
        body = LpBall(p, r, int(d.get("dim", d.get("n", 2))), scale)
    else:
        raise ValueError(f"unknown body type {kind!r}")
    if exact and not body.exact:
        raise ValueError(f"{kind} body cannot be evaluated in exact mode")
    return body


def body_to_json(body: ConvexBody) -> dict:
    return body.to_json()


def parse_point(values, exact: bool = True) -> tuple:
    return tuple(load_number(v, exact) for v in values)
