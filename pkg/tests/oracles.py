"""Brute-force reference computations, independent of the LP-based code paths.

Gauges are evaluated from closed forms (vertex enumeration for V-polytopes),
hull distances by golden-section search over segments, and counts by plain
enumeration of subsets and orderings.
"""

import itertools
import math

import numpy as np

from convsep.bodies import Ellipsoid, HPolytope, LpBall, VPolytope


def float_gauge(body):
    """A float gauge function for ``body`` that never touches the LP solver."""
    s = float(body.scale)
    if isinstance(body, HPolytope):
        A = np.array([[float(v) for v in a] for a in body.normals])
        return lambda z: float(np.max(np.abs(A @ np.asarray(z, float)))) / s
    if isinstance(body, VPolytope):
        # gauge of conv{+-v} is the support function of its polar H-polytope,
        # maximized over that polytope's vertices
        U = np.array([[float(v) for v in u] for u in body.polar().vertices])
        return lambda z: float(np.max(np.abs(U @ np.asarray(z, float)))) / s
    if isinstance(body, Ellipsoid):
        Q = np.array(body.Q)
        return lambda z: math.sqrt(max(float(np.asarray(z, float) @ Q @ np.asarray(z, float)), 0)) / s
    if isinstance(body, LpBall):
        p, r = body.p, float(body.r)
        return lambda z: float(np.linalg.norm(np.asarray(z, float), ord=p)) / (r * s)
    raise TypeError(body)


def _golden(f, lo=0.0, hi=1.0, iters=120):
    phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return min(fc, fd, f(lo), f(hi))


def _in_triangle(x, a, b, c, tol=1e-12):
    m = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]])
    if abs(np.linalg.det(m)) < 1e-15:
        return False
    s, t = np.linalg.solve(m, [x[0] - a[0], x[1] - a[1]])
    return s >= -tol and t >= -tol and s + t <= 1 + tol


def _on_segment_1d(x, pts):
    return min(pts) <= x <= max(pts)


def hull_distance(x, prior, gauge):
    """Gauge distance from ``x`` to ``conv(prior)`` in dimension 1 or 2."""
    x = np.asarray([float(v) for v in x])
    P = [np.asarray([float(v) for v in p]) for p in prior]
    n = len(x)
    if n == 1:
        vals = [p[0] for p in P]
        if _on_segment_1d(x[0], vals):
            return 0.0
        nearest = min(vals, key=lambda v: abs(v - x[0]))
        return gauge(x - np.array([nearest]))
    if n != 2:
        raise ValueError("brute-force hull distance is implemented for n <= 2")
    for a, b, c in itertools.combinations(P, 3):
        if _in_triangle(x, a, b, c):
            return 0.0
    best = min(gauge(x - p) for p in P)
    for a, b in itertools.combinations(P, 2):
        best = min(best, _golden(lambda s: gauge(x - (a + s * (b - a)))))
    return best


def _f(p):
    return np.array([float(v) for v in p])


def brute_mhat(points, gauge):
    """Longest ordering (of any subset) where each point has hull distance >= 1."""
    best = 1 if points else 0
    n = len(points)
    for size in range(2, n + 1):
        found = False
        for subset in itertools.combinations(range(n), size):
            for perm in itertools.permutations(subset):
                if all(hull_distance(points[perm[j]], [points[i] for i in perm[:j]], gauge) >= 1 - 1e-9
                       for j in range(1, size)):
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = size
    return best


def brute_msep(points, gauge):
    n = len(points)
    best = 1 if points else 0
    for size in range(2, n + 1):
        if any(all(gauge(np.subtract(_f(points[i]), _f(points[j]))) >= 1 - 1e-9
                   for i, j in itertools.combinations(s, 2))
               for s in itertools.combinations(range(n), size)):
            best = size
    return best


def brute_mtilde(points, gauge):
    n = len(points)
    best = 1 if points else 0
    for size in range(2, n + 1):
        for s in itertools.combinations(range(n), size):
            if all(hull_distance(points[i], [points[k] for k in s if k != i], gauge) >= 1 - 1e-9
                   for i in s):
                best = size
                break
    return best


def brute_cover(points, gauge):
    n = len(points)
    for size in range(1, n + 1):
        for centers in itertools.combinations(range(n), size):
            if all(any(gauge(np.subtract(_f(points[p]), _f(points[c]))) <= 1 + 1e-9
                       for c in centers) for p in range(n)):
                return size
    return n
