# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Howell-form elimination over Z/2^N (see zmod.py for the contract)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t
from libc.string cimport memcpy

cnp.import_array()


cdef inline int _val(uint64_t x) nogil:
    cdef int v = 0
    while not (x & 1):
        x >>= 1
        v += 1
    return v


cdef inline uint64_t _inv_odd(uint64_t u) nogil:
    # Newton iteration for the inverse modulo 2^64
    cdef uint64_t x = u
    cdef int i
    for i in range(6):
        x = x * (2 - u * x)
    return x


def howell_reduce(cnp.uint64_t[:, ::1] mat, int npiv, int N):
    cdef Py_ssize_t k = mat.shape[0]
    cdef Py_ssize_t n = mat.shape[1]
    cdef uint64_t mask = 0xFFFFFFFFFFFFFFFF if N >= 64 else ((<uint64_t>1) << N) - 1
    # room for every input row plus one annihilator row per pivot column
    cdef Py_ssize_t cap = k + npiv + 1
    pool_arr = np.zeros((cap, n), dtype=np.uint64)
    piv_arr = np.zeros((npiv if npiv < cap else cap, n), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] pool = pool_arr
    cdef cnp.uint64_t[:, ::1] piv = piv_arr
    cdef Py_ssize_t npool = k
    cdef Py_ssize_t npivots = 0
    cdef Py_ssize_t r, c, i, best
    cdef int v, bestv, vv
    cdef uint64_t e, f, u, uinv
    cols = []
    vals = []
    with nogil:
        for r in range(k):
            for i in range(n):
                pool[r, i] = mat[r, i] & mask
    for c in range(npiv):
        if npool == 0:
            break
        with nogil:
            best = -1
            bestv = 1000
            for r in range(npool):
                e = pool[r, c]
                if e != 0:
                    vv = _val(e)
                    if vv < bestv:
                        bestv = vv
                        best = r
                        if vv == 0:
                            break
        if best < 0:
            continue
        with nogil:
            v = bestv
            # move best row into the pivot list, normalized
            u = pool[best, c] >> v
            uinv = _inv_odd(u)
            for i in range(n):
                piv[npivots, i] = (pool[best, i] * uinv) & mask
            # swap-remove from pool
            npool -= 1
            if best != npool:
                for i in range(n):
                    pool[best, i] = pool[npool, i]
            # eliminate column c from the pool
            for r in range(npool):
                e = pool[r, c]
                if e != 0:
                    f = e >> v
                    for i in range(n):
                        pool[r, i] = (pool[r, i] - f * piv[npivots, i]) & mask
            # annihilator row
            if v > 0:
                e = 0
                for i in range(n):
                    pool[npool, i] = (piv[npivots, i] << (N - v)) & mask
                    e |= pool[npool, i]
                if e != 0:
                    npool += 1
            # compact zero rows
            r = 0
            while r < npool:
                e = 0
                for i in range(n):
                    e |= pool[r, i]
                if e == 0:
                    npool -= 1
                    if r != npool:
                        for i in range(n):
                            pool[r, i] = pool[npool, i]
                else:
                    r += 1
        cols.append(c)
        vals.append(v)
        npivots += 1
    return piv_arr[:npivots].copy(), cols, vals, pool_arr[:npool].copy()
