"""Pure-Python kernels. Used when the compiled ``_kernels`` extension is absent.

The compiled module exposes the same three functions with the same results;
``tests/test_kernels.py`` cross-checks them.
"""

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def simplex_max(A, b, c, eps=0, max_iter=10_000):
    """Maximize ``c.z`` over ``{z >= 0 : A z <= b}`` for ``b >= 0``.

    The origin is feasible, so a single phase suffices. Bland's rule rules out
    cycling. Works for any ordered field: pass Fractions with ``eps=0`` for an
    exact solve, floats with a small ``eps`` otherwise.

    Returns ``(status, value, z)``.
    """
    m = len(A)
    n = len(c)
    width = n + m
    T = []
    for i in range(m):
        row = list(A[i])
        row.extend(1 if k == i else 0 for k in range(m))
        row.append(b[i])
        T.append(row)
    obj = [-cj for cj in c] + [0] * m + [0]
    basis = [n + i for i in range(m)]

    for _ in range(max_iter):
        enter = -1
        for j in range(width):
            if obj[j] < -eps:
                enter = j
                break
        if enter < 0:
            z = [0] * n
            for i, bv in enumerate(basis):
                if bv < n:
                    z[bv] = T[i][-1]
            return OPTIMAL, obj[-1], z
        leave = -1
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > eps:
                ratio = T[i][-1] / a
                if (best is None or ratio < best
                        or (ratio == best and basis[i] < basis[leave])):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED, None, None
        prow = T[leave]
        piv = prow[enter]
        prow = [v / piv for v in prow]
        T[leave] = prow
        for i in range(m):
            if i != leave:
                f = T[i][enter]
                if f != 0:
                    row = T[i]
                    T[i] = [x - f * y for x, y in zip(row, prow)]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, prow)]
        basis[leave] = enter
    return ITERATION_LIMIT, None, None


def _popcount(x):
    return bin(x).count("1")


def max_independent_set(adj, cand):
    """Largest independent subset of the vertex mask ``cand``.

    ``adj[v]`` is the neighbour bitmask of vertex ``v`` (no self loops).
    Ties resolve deterministically toward the set found first by the branching
    order (lowest-index vertex of highest degree is excluded first).
    """
    best = [0, 0]  # size, mask

    def rec(cands, cur, size):
        if size + _popcount(cands) <= best[0]:
            return
        # take all isolated vertices greedily, branch on the densest one
        while True:
            pivot = -1
            pivot_deg = -1
            c = cands
            while c:
                low = c & -c
                v = low.bit_length() - 1
                c ^= low
                d = _popcount(adj[v] & cands)
                if d == 0:
                    cands ^= low
                    cur |= low
                    size += 1
                elif d > pivot_deg:
                    pivot, pivot_deg = v, d
            if pivot < 0:
                if size > best[0]:
                    best[0], best[1] = size, cur
                return
            if size + _popcount(cands) <= best[0]:
                return
            bit = 1 << pivot
            rec(cands & ~adj[pivot] & ~bit, cur | bit, size + 1)
            cands &= ~bit
            if size + _popcount(cands) <= best[0]:
                return

    rec(cand, 0, 0)
    return best[1]


def min_set_cover(sets, universe):
    """Smallest family of ``sets`` (bitmasks) whose union contains ``universe``.

    Returns a bitmask over set indices, or -1 when no cover exists.
    """
    n = len(sets)
    if universe == 0:
        return 0
    union = 0
    for s in sets:
        union |= s
    if universe & ~union:
        return -1
    biggest = max(_popcount(s & universe) for s in sets)
    best = [n + 1, 0]

    def rec(uncovered, chosen, count):
        if uncovered == 0:
            if count < best[0]:
                best[0], best[1] = count, chosen
            return
        lower = count + -(-_popcount(uncovered) // biggest)
        if lower >= best[0]:
            return
        low = uncovered & -uncovered
        options = [i for i in range(n) if sets[i] & low]
        options.sort(key=lambda i: (-_popcount(sets[i] & uncovered), i))
        for i in options:
            rec(uncovered & ~sets[i], chosen | (1 << i), count + 1)

    rec(universe, 0, 0)
    return best[1]
