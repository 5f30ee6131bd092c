"""Small dense LPs whose origin is feasible.

Every LP this package needs (support of an H-polytope, gauge of a V-polytope,
maximum-margin witnesses) has the form ``max c.z  s.t.  A z <= b, z >= 0`` with
``b >= 0``. Rational data is solved exactly; anything containing a float goes
to the float simplex (compiled when available).
"""

from __future__ import annotations

from fractions import Fraction

from . import kernels
from .scalar import all_exact

FLOAT_PIVOT_EPS = 1e-12


class LPError(RuntimeError):
    """The solver did not reach an optimum (numerical trouble or unboundedness)."""


def maximize(A, b, c, exact: bool | None = None):
    """Return ``(value, z)`` for ``max c.z`` over ``{z >= 0 : A z <= b}``."""
    if exact is None:
        exact = all_exact(A) and all_exact(b) and all_exact(c)
    if exact:
        A = [[Fraction(v) for v in row] for row in A]
        b = [Fraction(v) for v in b]
        c = [Fraction(v) for v in c]
        status, value, z = kernels.simplex_max_exact(A, b, c, 0)
    else:
        A = [[float(v) for v in row] for row in A]
        b = [float(v) for v in b]
        c = [float(v) for v in c]
        status, value, z = kernels.simplex_max_float(A, b, c, FLOAT_PIVOT_EPS)
    if status == kernels.UNBOUNDED:
        raise LPError("LP is unbounded")
    if status != kernels.OPTIMAL:
        raise LPError("LP iteration limit reached")
    return value, z
