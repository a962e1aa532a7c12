# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stride-update kernels.

Every product factor the package expands reduces to one of four in-place
updates on a coefficient buffer ``c`` with stride ``e``:

    ascending,  sign=+1:  c[n] += c[n-e]   (multiply by 1/(1 - q^e))
    ascending,  sign=-1:  c[n] -= c[n-e]   (multiply by 1/(1 + q^e))
    descending, sign=+1:  c[n] += c[n-e]   (multiply by 1 + q^e)
    descending, sign=-1:  c[n] -= c[n-e]   (multiply by 1 - q^e)
"""

from libc.stdint cimport int64_t

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

IMPLEMENTATION = "cython"


def mod_stride(int64_t[::1] c, Py_ssize_t e, int sign, bint ascending, int64_t m):
    """Apply one stride update to residues in ``[0, m)``; ``m < 2**62``."""
    cdef Py_ssize_t n, size = c.shape[0]
    cdef int64_t v
    if e <= 0:
        raise ValueError("stride must be positive")
    if e >= size:
        return
    if ascending:
        if sign > 0:
            for n in range(e, size):
                v = c[n] + c[n - e]
                if v >= m:
                    v -= m
                c[n] = v
        else:
            for n in range(e, size):
                v = c[n] - c[n - e]
                if v < 0:
                    v += m
                c[n] = v
    else:
        if sign > 0:
            for n in range(size - 1, e - 1, -1):
                v = c[n] + c[n - e]
                if v >= m:
                    v -= m
                c[n] = v
        else:
            for n in range(size - 1, e - 1, -1):
                v = c[n] - c[n - e]
                if v < 0:
                    v += m
                c[n] = v


def exact_stride(list c, Py_ssize_t e, int sign, bint ascending):
    """Apply one stride update to a list of Python integers."""
    cdef Py_ssize_t n, size = len(c)
    if e <= 0:
        raise ValueError("stride must be positive")
    if e >= size:
        return
    if ascending:
        if sign > 0:
            for n in range(e, size):
                c[n] = c[n] + c[n - e]
        else:
            for n in range(e, size):
                c[n] = c[n] - c[n - e]
    else:
        if sign > 0:
            for n in range(size - 1, e - 1, -1):
                c[n] = c[n] + c[n - e]
        else:
            for n in range(size - 1, e - 1, -1):
                c[n] = c[n] - c[n - e]


def mod_convolve(const int64_t[::1] f, const int64_t[::1] g, int64_t m):
    """Truncated Cauchy product of two residue vectors of equal length.

    Uses 128-bit accumulation so any ``m < 2**62`` is safe.
    """
    cdef Py_ssize_t n, i, size = f.shape[0]
    cdef u128 acc
    import numpy as np
    out = np.zeros(size, dtype=np.int64)
    cdef int64_t[::1] h = out
    for n in range(size):
        acc = 0
        for i in range(n + 1):
            acc += <u128>f[i] * <u128>g[n - i]
            if acc >= (<u128>1 << 126):
                acc %= <u128>m
        h[n] = <int64_t>(acc % <u128>m)
    return out
