# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pool-adjacent-violators kernel (nondecreasing least squares)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def pav_blocks(y):
    """Nondecreasing least-squares fit of ``y`` plus pooled block starts."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yy.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sol = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sums = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] starts = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t nb = 0, i, b, pos
    cdef double cur_sum, mean
    cdef cnp.int64_t cur_count

    for i in range(n):
        cur_sum = yy[i]
        cur_count = 1
        # merge while the previous block mean strictly exceeds the current one
        while nb > 0 and sums[nb - 1] * cur_count > cur_sum * counts[nb - 1]:
            cur_sum += sums[nb - 1]
            cur_count += counts[nb - 1]
            nb -= 1
        sums[nb] = cur_sum
        counts[nb] = cur_count
        starts[nb] = i - cur_count + 1
        nb += 1

    pos = 0
    for b in range(nb):
        mean = sums[b] / counts[b]
        for i in range(counts[b]):
            sol[pos] = mean
            pos += 1

    return sol, starts[:nb].copy()
