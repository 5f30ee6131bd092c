"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``CONVSEP_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
the cross-check tests).
"""

import os

from . import _kernels_py

try:
    if os.environ.get("CONVSEP_PURE_PYTHON"):
        raise ImportError("pure-python kernels requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

OPTIMAL = _kernels_py.OPTIMAL
UNBOUNDED = _kernels_py.UNBOUNDED
ITERATION_LIMIT = _kernels_py.ITERATION_LIMIT

simplex_max_float = _impl.simplex_max
max_independent_set = _impl.max_independent_set
min_set_cover = _impl.min_set_cover
simplex_max_exact = _kernels_py.simplex_max
