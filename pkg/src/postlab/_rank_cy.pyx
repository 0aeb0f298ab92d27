# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Gaussian elimination over F_p for p < 2**31."""

import numpy as np

from libc.stdint cimport int64_t, uint64_t


cdef inline uint64_t _powmod(uint64_t a, uint64_t e, uint64_t p) nogil:
    cdef uint64_t r = 1
    a %= p
    while e:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


def rank_mod_p(A, int64_t p):
    """Rank of a 2-D integer array with entries in [0, p)."""
    cdef uint64_t[:, ::1] M = np.ascontiguousarray(A, dtype=np.uint64).copy()
    cdef Py_ssize_t rows = M.shape[0]
    cdef Py_ssize_t cols = M.shape[1]
    cdef uint64_t q = <uint64_t>p
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef uint64_t inv, f, neg, tmp
    with nogil:
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if M[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, cols):
                    tmp = M[r, j]
                    M[r, j] = M[piv, j]
                    M[piv, j] = tmp
            inv = _powmod(M[r, c], q - 2, q)
            for j in range(c, cols):
                M[r, j] = (M[r, j] * inv) % q
            for i in range(r + 1, rows):
                f = M[i, c]
                if f == 0:
                    continue
                neg = q - f
                for j in range(c, cols):
                    M[i, j] = (M[i, j] + neg * M[r, j]) % q
            r += 1
    return r
