# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled q-permanent kernels; same API as ``quon._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport calloc, free
from libc.string cimport memset

cnp.import_array()

cdef extern from *:
    int __builtin_popcount(unsigned int) nogil

cdef int MAX_LEN = 12


cdef int _check_len(Py_ssize_t n) except -1:
    if n > MAX_LEN:
        raise ValueError(f"compiled kernel supports words up to length {MAX_LEN}")
    return 0


cdef int _coeffs_c(const int *bra, const int *ket, int n, long long *dp,
                   long long *res) noexcept nogil:
    """Write the overlap polynomial into ``res``; return 0 if it vanishes.

    ``dp`` is scratch of size ``(1 << n) * deg``.
    """
    cdef int deg = n * (n - 1) // 2 + 1
    cdef unsigned int full = (1u << n)
    cdef unsigned int mask, bit
    cdef int k, p, e, shift, b
    cdef long long c
    cdef long long *src
    cdef long long *tgt
    memset(dp, 0, full * deg * sizeof(long long))
    dp[0] = 1
    # masks of popcount k are only reachable after k steps, so one pass
    # over masks in increasing order is enough.
    for mask in range(full):
        k = __builtin_popcount(mask)
        if k >= n:
            continue
        src = dp + mask * deg
        b = bra[k]
        for p in range(n):
            bit = 1u << p
            if mask & bit or ket[p] != b:
                continue
            shift = __builtin_popcount(mask >> (p + 1))
            tgt = dp + (mask | bit) * deg
            for e in range(deg - shift):
                c = src[e]
                if c:
                    tgt[e + shift] += c
    src = dp + (full - 1) * deg
    c = 0
    for e in range(deg):
        res[e] = src[e]
        c |= src[e]
    return 1 if c else 0


cdef double _value_c(const int *bra, const int *ket, int n, double *powers,
                     double *dp) noexcept nogil:
    cdef unsigned int full = (1u << n)
    cdef unsigned int mask, bit
    cdef int k, p, b
    cdef double v
    memset(dp, 0, full * sizeof(double))
    dp[0] = 1.0
    for mask in range(full):
        v = dp[mask]
        if v == 0.0:
            continue
        k = __builtin_popcount(mask)
        if k >= n:
            continue
        b = bra[k]
        for p in range(n):
            bit = 1u << p
            if mask & bit or ket[p] != b:
                continue
            dp[mask | bit] += v * powers[__builtin_popcount(mask >> (p + 1))]
    return dp[full - 1]


def qperm_coeffs(bra, ket):
    """Coefficient list of the vacuum overlap as a polynomial in q."""
    cdef int[::1] b = np.ascontiguousarray(bra, dtype=np.int32)
    cdef int[::1] k = np.ascontiguousarray(ket, dtype=np.int32)
    cdef int n = b.shape[0]
    if k.shape[0] != n:
        return [0]
    if n == 0:
        return [1]
    _check_len(n)
    cdef int deg = n * (n - 1) // 2 + 1
    cdef long long *dp = <long long *>calloc((1u << n) * deg, sizeof(long long))
    cdef long long *res = <long long *>calloc(deg, sizeof(long long))
    try:
        if not _coeffs_c(&b[0], &k[0], n, dp, res):
            return [0]
        return [res[e] for e in range(deg)]
    finally:
        free(dp)
        free(res)


def qperm_value(bra, ket, double q):
    cdef int[::1] b = np.ascontiguousarray(bra, dtype=np.int32)
    cdef int[::1] k = np.ascontiguousarray(ket, dtype=np.int32)
    cdef int n = b.shape[0]
    cdef int e
    if k.shape[0] != n:
        return 0.0
    if n == 0:
        return 1.0
    _check_len(n)
    cdef double *powers = <double *>calloc(n, sizeof(double))
    cdef double *dp = <double *>calloc(1u << n, sizeof(double))
    try:
        powers[0] = 1.0
        for e in range(1, n):
            powers[e] = powers[e - 1] * q
        return _value_c(&b[0], &k[0], n, powers, dp)
    finally:
        free(powers)
        free(dp)


def fill_gram_coeffs(words, cnp.int64_t[:, :, ::1] out, Py_ssize_t row_start,
                     Py_ssize_t row_stop):
    """Fill rows ``[row_start, row_stop)`` of ``out[i, j, e]`` in place."""
    cdef int[:, ::1] w = np.ascontiguousarray(words, dtype=np.int32)
    cdef Py_ssize_t m = w.shape[0], i, j
    cdef int n = w.shape[1], e
    if m == 0:
        return
    if n == 0:
        for i in range(row_start, row_stop):
            for j in range(m):
                out[i, j, 0] = 1
        return
    _check_len(n)
    cdef int deg = n * (n - 1) // 2 + 1
    cdef long long *dp = <long long *>calloc((1u << n) * deg, sizeof(long long))
    cdef long long *res = <long long *>calloc(deg, sizeof(long long))
    try:
        with nogil:
            for i in range(row_start, row_stop):
                for j in range(m):
                    if _coeffs_c(&w[i, 0], &w[j, 0], n, dp, res):
                        for e in range(deg):
                            out[i, j, e] = res[e]
    finally:
        free(dp)
        free(res)


def fill_gram_float(words, double q, double[:, ::1] out, Py_ssize_t row_start,
                    Py_ssize_t row_stop):
    cdef int[:, ::1] w = np.ascontiguousarray(words, dtype=np.int32)
    cdef Py_ssize_t m = w.shape[0], i, j
    cdef int n = w.shape[1], e
    if m == 0:
        return
    if n == 0:
        for i in range(row_start, row_stop):
            for j in range(m):
                out[i, j] = 1.0
        return
    _check_len(n)
    cdef double *powers = <double *>calloc(n, sizeof(double))
    cdef double *dp = <double *>calloc(1u << n, sizeof(double))
    try:
        powers[0] = 1.0
        for e in range(1, n):
            powers[e] = powers[e - 1] * q
        with nogil:
            for i in range(row_start, row_stop):
                for j in range(m):
                    out[i, j] = _value_c(&w[i, 0], &w[j, 0], n, powers, dp)
    finally:
        free(powers)
        free(dp)
