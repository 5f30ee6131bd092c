"""Compiled vs pure-Python kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times each kernel on fixed seeded inputs through both implementations,
checks that they return the same answers, then times a full pool-exact
Mhat count in a subprocess per backend (the backend is picked at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from convsep import _kernels_py

try:
    from convsep import _kernels as _compiled
except ImportError:
    _compiled = None


def random_graph(rng, n, p):
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def random_sets(rng, n_sets, universe_bits, p):
    sets = []
    for _ in range(n_sets):
        m = 0
        for b in range(universe_bits):
            if rng.random() < p:
                m |= 1 << b
        sets.append(m)
    sets.append(1 << universe_bits - 1)
    universe = 0
    for s in sets:
        universe |= s
    return sets, universe


def random_lp(rng, m, n):
    A = rng.uniform(-1, 1, (m, n)).tolist()
    b = rng.uniform(0.5, 2, m).tolist()
    c = rng.uniform(-1, 1, n).tolist()
    # box rows keep it bounded
    for i in range(n):
        A.append([1.0 if j == i else 0.0 for j in range(n)])
        A.append([-1.0 if j == i else 0.0 for j in range(n)])
        b += [1.0, 1.0]
    return A, b, c


def cases():
    rng = np.random.default_rng(np.random.Philox(2024))
    mis = [(random_graph(rng, 40, 0.3),) for _ in range(5)]
    cover = [random_sets(rng, 30, 24, 0.15) for _ in range(5)]
    lps = [random_lp(rng, 30, 8) for _ in range(20)]
    return {
        "max_independent_set (n=40)": ("max_independent_set",
                                       [(a[0], (1 << 40) - 1) for a in mis]),
        "min_set_cover (30 sets, 24 elems)": ("min_set_cover", cover),
        "simplex_max (30x8 float)": ("simplex_max", [(A, b, c, 1e-12) for A, b, c in lps]),
    }


def time_kernel(module, name, args, repeat):
    fn = getattr(module, name)
    results = [fn(*a) for a in args]
    t = min(timeit.repeat(lambda: [fn(*a) for a in args], number=1, repeat=repeat))
    return t, results


def same(name, a, b):
    if name != "simplex_max":
        return a == b
    return all(x[0] == y[0] and abs(x[1] - y[1]) <= 1e-9 * max(1, abs(x[1])) for x, y in zip(a, b))


MHAT_SCRIPT = """
import time
from convsep import kernels
from convsep.counters import exact_mhat_over_pool
from convsep.pools import make_instance
t = time.perf_counter()
sizes = [exact_mhat_over_pool(i.pool, i.K, i.B).lower
         for i in (make_instance("polytope", 2, s, pool_size=14) for s in range(6))]
print(kernels.BACKEND, time.perf_counter() - t, sizes)
"""


def time_mhat(pure):
    env = dict(os.environ)
    env.pop("CONVSEP_PURE_PYTHON", None)
    if pure:
        env["CONVSEP_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", MHAT_SCRIPT], env=env, check=True,
                         capture_output=True, text=True).stdout.split(maxsplit=2)
    return out[0], float(out[1]), out[2].strip()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'kernel':36} {'python s':>10} {'compiled s':>11} {'speedup':>8}  agree")
    for label, (name, inputs) in cases().items():
        tp, rp = time_kernel(_kernels_py, name, inputs, args.repeat)
        tc, rc = time_kernel(_compiled, name, inputs, args.repeat)
        print(f"{label:36} {tp:10.4f} {tc:11.4f} {tp / tc:8.1f}x  {same(name, rp, rc)}")
    py = time_mhat(True)
    co = time_mhat(False)
    print(f"{'Mhat pool-exact (6 x 14 points)':36} {py[1]:10.4f} {co[1]:11.4f} "
          f"{py[1] / co[1]:8.1f}x  {py[2] == co[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
