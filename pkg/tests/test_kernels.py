import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from convsep import _kernels_py, kernels, lp
from convsep.pools import make_rng

try:
    from convsep import _kernels as compiled
except ImportError:  # pragma: no cover - exercised only without a build
    compiled = None

IMPLS = [_kernels_py] + ([compiled] if compiled else [])


def brute_mis(adj, n):
    best = 0
    for mask in range(1 << n):
        if all(not (adj[i] & mask) for i in range(n) if mask >> i & 1):
            best = max(best, bin(mask).count("1"))
    return best


def brute_cover(sets, universe):
    for k in range(len(sets) + 1):
        for combo in itertools.combinations(range(len(sets)), k):
            u = 0
            for i in combo:
                u |= sets[i]
            if universe & ~u == 0:
                return k
    return -1


def random_graph(rng, n, p):
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__)
@pytest.mark.parametrize("seed", range(15))
def test_mis_matches_brute_force(impl, seed):
    rng = make_rng(seed)
    n = int(rng.integers(1, 13))
    adj = random_graph(rng, n, float(rng.uniform(0.1, 0.7)))
    mask = impl.max_independent_set(adj, (1 << n) - 1)
    assert all(not (adj[i] & mask) for i in range(n) if mask >> i & 1)
    assert bin(mask).count("1") == brute_mis(adj, n)


@pytest.mark.parametrize("seed", range(10))
def test_mis_implementations_agree(seed):
    if compiled is None:
        pytest.skip("compiled kernels not built")
    rng = make_rng(50 + seed)
    n = 40
    adj = random_graph(rng, n, 0.3)
    cand = int(rng.integers(1, 1 << 40))
    assert compiled.max_independent_set(adj, cand) == _kernels_py.max_independent_set(adj, cand)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__)
@pytest.mark.parametrize("seed", range(15))
def test_set_cover_matches_brute_force(impl, seed):
    rng = make_rng(seed)
    m = int(rng.integers(1, 10))
    k = int(rng.integers(1, 9))
    sets = [int(rng.integers(0, 1 << m)) for _ in range(k)]
    universe = (1 << m) - 1
    chosen = impl.min_set_cover(sets, universe)
    expected = brute_cover(sets, universe)
    if expected < 0:
        assert chosen == -1
    else:
        u = 0
        for i in range(k):
            if chosen >> i & 1:
                u |= sets[i]
        assert universe & ~u == 0 and bin(chosen).count("1") == expected


def random_lp(rng, m, n):
    A = rng.integers(-4, 5, (m, n)).tolist()
    b = rng.integers(0, 6, m).tolist()
    c = rng.integers(-3, 4, n).tolist()
    # a box keeps the LP bounded
    A += np.eye(n, dtype=int).tolist()
    b += [3] * n
    return A, b, c


@pytest.mark.parametrize("seed", range(20))
def test_simplex_exact_matches_scipy(seed):
    rng = make_rng(seed)
    A, b, c = random_lp(rng, int(rng.integers(1, 6)), int(rng.integers(1, 5)))
    value, z = lp.maximize(A, b, c)
    assert isinstance(value, (int, F))
    ref = linprog([-v for v in c], A_ub=A, b_ub=b, bounds=[(0, None)] * len(c), method="highs")
    assert float(value) == pytest.approx(-ref.fun, abs=1e-9)
    assert all(sum(a * zi for a, zi in zip(row, z)) <= bi for row, bi in zip(A, b))
    assert sum(ci * zi for ci, zi in zip(c, z)) == value


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__)
@pytest.mark.parametrize("seed", range(20))
def test_simplex_float_matches_exact(impl, seed):
    rng = make_rng(seed)
    A, b, c = random_lp(rng, int(rng.integers(1, 6)), int(rng.integers(1, 5)))
    exact, _ = lp.maximize(A, b, c)
    status, value, z = impl.simplex_max([[float(v) for v in r] for r in A],
                                        [float(v) for v in b], [float(v) for v in c], 1e-12)
    assert status == kernels.OPTIMAL
    assert value == pytest.approx(float(exact), abs=1e-9)


def test_unbounded_lp_raises():
    with pytest.raises(lp.LPError):
        lp.maximize([[1, -1]], [1], [0, 1])


def test_env_var_selects_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, CONVSEP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from convsep import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == "python"
