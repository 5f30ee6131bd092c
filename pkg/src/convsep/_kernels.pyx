# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: float simplex, bitmask independent set, exact set cover.

Same algorithms and tie-breaking as ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def simplex_max(A, b, c, double eps=0.0, int max_iter=10000):
    cdef Py_ssize_t m = len(A)
    cdef Py_ssize_t n = len(c)
    cdef Py_ssize_t width = n + m
    cdef Py_ssize_t i, j, enter, leave, it
    cdef double a, ratio, best, piv, f
    cdef bint have_best
    cdef cnp.ndarray[cnp.double_t, ndim=2] Tarr = np.zeros((m, width + 1))
    cdef cnp.ndarray[cnp.double_t, ndim=1] objarr = np.zeros(width + 1)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] basisarr = np.zeros(m, dtype=np.int64)
    cdef double[:, :] T = Tarr
    cdef double[:] obj = objarr
    cdef long long[:] basis = basisarr

    if m:
        Tarr[:, :n] = np.asarray(A, dtype=float).reshape(m, n)
        Tarr[:, width] = np.asarray(b, dtype=float)
    for i in range(m):
        T[i, n + i] = 1.0
        basis[i] = n + i
    for j in range(n):
        obj[j] = -float(c[j])

    for it in range(max_iter):
        enter = -1
        for j in range(width):
            if obj[j] < -eps:
                enter = j
                break
        if enter < 0:
            z = [0.0] * n
            for i in range(m):
                if basis[i] < n:
                    z[basis[i]] = T[i, width]
            return OPTIMAL, obj[width], z
        leave = -1
        have_best = False
        best = 0.0
        for i in range(m):
            a = T[i, enter]
            if a > eps:
                ratio = T[i, width] / a
                if (not have_best or ratio < best
                        or (ratio == best and basis[i] < basis[leave])):
                    best = ratio
                    have_best = True
                    leave = i
        if leave < 0:
            return UNBOUNDED, None, None
        piv = T[leave, enter]
        for j in range(width + 1):
            T[leave, j] = T[leave, j] / piv
        for i in range(m):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(width + 1):
                        T[i, j] = T[i, j] - f * T[leave, j]
        f = obj[enter]
        for j in range(width + 1):
            obj[j] = obj[j] - f * T[leave, j]
        basis[leave] = enter
    return ITERATION_LIMIT, None, None


cdef struct MisState:
    int best_size
    uint64_t best_mask


cdef void _mis(uint64_t* adj, uint64_t cands, uint64_t cur, int size, MisState* st) noexcept nogil:
    cdef int pivot, pivot_deg, d, v
    cdef uint64_t c, low, bit
    if size + __builtin_popcountll(cands) <= st.best_size:
        return
    while True:
        pivot = -1
        pivot_deg = -1
        c = cands
        while c:
            low = c & (~c + 1)
            v = __builtin_ctzll(c)
            c ^= low
            d = __builtin_popcountll(adj[v] & cands)
            if d == 0:
                cands ^= low
                cur |= low
                size += 1
            elif d > pivot_deg:
                pivot = v
                pivot_deg = d
        if pivot < 0:
            if size > st.best_size:
                st.best_size = size
                st.best_mask = cur
            return
        if size + __builtin_popcountll(cands) <= st.best_size:
            return
        bit = (<uint64_t>1) << pivot
        _mis(adj, cands & ~adj[pivot] & ~bit, cur | bit, size + 1, st)
        cands &= ~bit
        if size + __builtin_popcountll(cands) <= st.best_size:
            return


def max_independent_set(adj, cand):
    cdef Py_ssize_t n = len(adj)
    if n > 64:
        raise ValueError("compiled independent-set kernel handles at most 64 vertices")
    cdef uint64_t buf[64]
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = <uint64_t>adj[i]
    cdef MisState st
    st.best_size = 0
    st.best_mask = 0
    _mis(buf, <uint64_t>cand, 0, 0, &st)
    return int(st.best_mask)


cdef struct CoverState:
    int best_count
    uint64_t best_chosen
    int biggest
    int n


cdef void _cover(uint64_t* sets, uint64_t uncovered, uint64_t chosen, int count,
                 CoverState* st) noexcept nogil:
    cdef int lower, k, i, j, tmp, nopt
    cdef int opts[64]
    cdef int gain[64]
    cdef uint64_t low
    if uncovered == 0:
        if count < st.best_count:
            st.best_count = count
            st.best_chosen = chosen
        return
    k = __builtin_popcountll(uncovered)
    lower = count + (k + st.biggest - 1) // st.biggest
    if lower >= st.best_count:
        return
    low = uncovered & (~uncovered + 1)
    nopt = 0
    for i in range(st.n):
        if sets[i] & low:
            opts[nopt] = i
            gain[nopt] = __builtin_popcountll(sets[i] & uncovered)
            nopt += 1
    # insertion sort: larger gain first, then lower index
    for i in range(1, nopt):
        j = i
        while j > 0 and (gain[j] > gain[j - 1]
                         or (gain[j] == gain[j - 1] and opts[j] < opts[j - 1])):
            tmp = gain[j]; gain[j] = gain[j - 1]; gain[j - 1] = tmp
            tmp = opts[j]; opts[j] = opts[j - 1]; opts[j - 1] = tmp
            j -= 1
    for i in range(nopt):
        _cover(sets, uncovered & ~sets[opts[i]], chosen | ((<uint64_t>1) << opts[i]),
               count + 1, st)


def min_set_cover(sets, universe):
    cdef Py_ssize_t n = len(sets)
    if n > 64:
        raise ValueError("compiled set-cover kernel handles at most 64 sets")
    if universe == 0:
        return 0
    union = 0
    for s in sets:
        union |= s
    if universe & ~union:
        return -1
    cdef uint64_t buf[64]
    cdef Py_ssize_t i
    cdef int biggest = 0
    cdef int pc
    for i in range(n):
        buf[i] = <uint64_t>sets[i]
        pc = __builtin_popcountll(buf[i] & <uint64_t>universe)
        if pc > biggest:
            biggest = pc
    cdef CoverState st
    st.best_count = n + 1
    st.best_chosen = 0
    st.biggest = biggest
    st.n = n
    _cover(buf, <uint64_t>universe, 0, 0, &st)
    return int(st.best_chosen)
