"""Number handling shared by every module.

Polytope data lives in :class:`fractions.Fraction` so that certificates over
polytopes are checked exactly. Ellipsoids and non-polyhedral l_p balls use
floats; comparisons there go through a single global tolerance ``EPS``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, float]
Vector = tuple

EPS = 1e-9

EXACT = "exact"
FLOAT = "float"


def is_exact(value) -> bool:
    return isinstance(value, Rational) and not isinstance(value, bool)


def all_exact(values: Iterable) -> bool:
    for v in values:
        if isinstance(v, (tuple, list)):
            if not all_exact(v):
                return False
        elif not is_exact(v):
            return False
    return True


def to_fraction(value) -> Fraction:
    """Parse ``value`` as an exact rational.

    Strings may be ``"p/q"`` or decimal literals; floats are read through their
    shortest repr, so ``0.1`` becomes ``1/10`` rather than its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def to_float(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        return float(Fraction(value.strip()))
    return float(value)


def vec(values: Iterable, exact: bool = True) -> tuple:
    conv = to_fraction if exact else to_float
    return tuple(conv(v) for v in values)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def smul(t, v: Sequence) -> tuple:
    return tuple(t * a for a in v)


def neg(v: Sequence) -> tuple:
    return tuple(-a for a in v)


def geq(a, b, exact: bool) -> bool:
    """``a >= b`` exactly, or up to ``EPS`` in float mode."""
    if exact:
        return a >= b
    return float(a) >= float(b) - EPS


def leq(a, b, exact: bool) -> bool:
    return geq(b, a, exact)


def ceil(x) -> int:
    if is_exact(x):
        return math.ceil(Fraction(x))
    return math.ceil(x)


def floor(x) -> int:
    if is_exact(x):
        return math.floor(Fraction(x))
    return math.floor(x)


def dump_number(value):
    """JSON form: ``"p/q"`` strings for rationals, plain floats otherwise."""
    if is_exact(value):
        f = Fraction(value)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def load_number(value, exact: bool):
    if exact:
        return to_fraction(value)
    return to_float(value)


def rank(rows: Sequence[Sequence]) -> int:
    """Rank of a matrix by Gaussian elimination (exact when entries are rational)."""
    exact = all_exact(rows)
    m = [list(map(Fraction, r)) if exact else [float(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        if exact:
            piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        else:
            best = max(range(r, len(m)), key=lambda i: abs(m[i][c]), default=None)
            piv = best if best is not None and abs(m[best][c]) > 1e-12 else None
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def solve(a: Sequence[Sequence], b: Sequence):
    """Solve the square system ``a x = b``; None if singular. Exact on rationals."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return tuple(row[n] for row in m)
