# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-statistics kernels.

Drop-in twin of ``rulepick._pairstats_py`` selected at import time by
``rulepick.kernels``.  Weighted sums use a faithful port of CPython's
``math.fsum`` (Shewchuk partials with the half-even correction), so results
are bitwise identical to the pure-Python fallback and independent of pair
enumeration order.
"""

from libc.math cimport fabs

import numpy as np

cimport numpy as cnp

cnp.import_array()

__all__ = ["pair_counts", "pair_products_total", "pair_sums"]

DEF MAX_PARTIALS = 128


cdef struct Fsum:
    double p[MAX_PARTIALS]
    Py_ssize_t n


cdef inline void _fsum_init(Fsum* acc) noexcept nogil:
    acc.n = 0


cdef inline int _fsum_add(Fsum* acc, double x) noexcept nogil:
    cdef Py_ssize_t i = 0, j
    cdef double y, hi, lo, yr, t
    for j in range(acc.n):
        y = acc.p[j]
        if fabs(x) < fabs(y):
            t = x
            x = y
            y = t
        hi = x + y
        yr = hi - x
        lo = y - yr
        if lo != 0.0:
            acc.p[i] = lo
            i += 1
        x = hi
    acc.n = i
    if x != 0.0:
        if acc.n >= MAX_PARTIALS:
            return -1
        acc.p[acc.n] = x
        acc.n += 1
    return 0


cdef inline double _fsum_round(Fsum* acc) noexcept nogil:
    # Final correctly-rounded sum of the partials, including the correction
    # that makes half-even rounding work across multiple partials.
    cdef double hi = 0.0, x, y, yr, lo = 0.0
    cdef Py_ssize_t n = acc.n
    if n > 0:
        n -= 1
        hi = acc.p[n]
        while n > 0:
            x = hi
            n -= 1
            y = acc.p[n]
            hi = x + y
            yr = hi - x
            lo = y - yr
            if lo != 0.0:
                break
        if n > 0 and ((lo < 0.0 and acc.p[n - 1] < 0.0) or
                      (lo > 0.0 and acc.p[n - 1] > 0.0)):
            y = lo * 2.0
            x = hi + y
            yr = x - hi
            if y == yr:
                hi = x
    return hi


def pair_counts(g1, g2):
    """Count (strictly discordant, tied-in-at-least-one) unordered pairs."""
    cdef cnp.int64_t[::1] a = np.ascontiguousarray(g1, dtype=np.int64)
    cdef cnp.int64_t[::1] b = np.ascontiguousarray(g2, dtype=np.int64)
    if a.shape[0] != b.shape[0]:
        raise ValueError("domain mismatch")
    cdef Py_ssize_t m = a.shape[0], i, j
    cdef long long disc = 0, tied = 0
    cdef cnp.int64_t d1, d2
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                d1 = a[i] - a[j]
                d2 = b[i] - b[j]
                if d1 == 0 or d2 == 0:
                    tied += 1
                elif (d1 > 0) != (d2 > 0):
                    disc += 1
    return int(disc), int(tied)


def pair_sums(g1, g2, w):
    """Weighted KT numerator and divisor; see the pure-Python twin."""
    cdef cnp.int64_t[::1] a = np.ascontiguousarray(g1, dtype=np.int64)
    cdef cnp.int64_t[::1] b = np.ascontiguousarray(g2, dtype=np.int64)
    cdef double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    if a.shape[0] != b.shape[0] or a.shape[0] != ww.shape[0]:
        raise ValueError("domain mismatch")
    cdef Py_ssize_t m = a.shape[0], i, j
    cdef Fsum num, den
    cdef double prod
    cdef cnp.int64_t d1, d2
    cdef int err = 0
    _fsum_init(&num)
    _fsum_init(&den)
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                prod = ww[i] * ww[j]
                err |= _fsum_add(&den, prod)
                d1 = a[i] - a[j]
                d2 = b[i] - b[j]
                if d1 == 0 or d2 == 0:
                    err |= _fsum_add(&num, 0.5 * prod)
                elif (d1 > 0) != (d2 > 0):
                    err |= _fsum_add(&num, prod)
    if err:
        raise OverflowError("summation partials overflow")
    return _fsum_round(&num), _fsum_round(&den)


def pair_products_total(w):
    """Sum of ``w_i * w_j`` over all unordered pairs (the KT normalizer)."""
    cdef double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t m = ww.shape[0], i, j
    cdef Fsum acc
    cdef int err = 0
    _fsum_init(&acc)
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                err |= _fsum_add(&acc, ww[i] * ww[j])
    if err:
        raise OverflowError("summation partials overflow")
    return _fsum_round(&acc)
