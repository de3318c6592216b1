# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree kernels (OpenMP over node index ranges).

Same contract and index layout as ``_fallback``.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport log2, fabs, fmin, fmax

cnp.import_array()

NAME = "cython"

cdef Py_ssize_t CHUNK = 4096


cdef inline double _hb(double g) noexcept nogil:
    cdef double h = 1.0 - g
    cdef double out = 0.0
    if g > 0.0:
        out -= g * log2(g)
    if h > 0.0:
        out -= h * log2(h)
    return out


cdef inline double _phi(double y, double a, double pi10, double eps) noexcept nogil:
    return _hb(eps + (1.0 - 2.0 * eps) * (a * y + pi10))


# Belief updates in a form whose every step is monotone in q, so the
# computed maps are exactly nondecreasing and lo <= belief <= hi survives rounding.
cdef inline double _f0(double q, double eps) noexcept nogil:
    return fmin((1.0 - eps) / ((1.0 - 2.0 * eps) + eps / q), 1.0)


cdef inline double _f1(double q, double eps) noexcept nogil:
    return fmin(eps / ((1.0 - eps) / q - (1.0 - 2.0 * eps)), 1.0)


def expand_level(double[::1] prob, double[::1] belief, double[::1] lo,
                 double[::1] hi, double a, double pi10, double eps,
                 int nthreads=1):
    cdef Py_ssize_t n = prob.shape[0]
    cdef Py_ssize_t i
    cdef double q, g, h, x
    cprob_a = np.empty(2 * n)
    cbel_a = np.empty(2 * n)
    clo_a = np.empty(2 * n)
    chi_a = np.empty(2 * n)
    cdef double[::1] cprob = cprob_a
    cdef double[::1] cbel = cbel_a
    cdef double[::1] clo = clo_a
    cdef double[::1] chi = chi_a
    cdef double s = 1.0 - 2.0 * eps
    for i in prange(n, nogil=True, schedule="static", num_threads=max(nthreads, 1)):
        q = a * belief[i] + pi10
        g = eps + s * q
        h = 1.0 - g
        cprob[2 * i] = prob[i] * g
        cprob[2 * i + 1] = prob[i] * h
        cbel[2 * i] = _f0(q, eps)
        cbel[2 * i + 1] = _f1(q, eps)
        q = a * lo[i] + pi10
        clo[2 * i] = _f0(q, eps)
        clo[2 * i + 1] = _f1(q, eps)
        q = a * hi[i] + pi10
        chi[2 * i] = _f0(q, eps)
        chi[2 * i + 1] = _f1(q, eps)
    return cprob_a, cbel_a, clo_a, chi_a


def row_partials(double[::1] prob, double[::1] belief, double[::1] lo,
                 double[::1] hi, double a, double pi10, double eps,
                 int nthreads=1):
    cdef Py_ssize_t n = prob.shape[0]
    cdef Py_ssize_t nchunks = (n + CHUNK - 1) // CHUNK
    totals_a = np.zeros((nchunks, 3))
    carries_a = np.zeros((nchunks, 3))
    cdef double[:, ::1] totals = totals_a
    cdef double[:, ::1] carries = carries_a
    cdef double slope = a * (1.0 - 2.0 * eps)
    cdef bint flat = not (slope > 0.0)
    cdef double ystar = 0.0
    if not flat:
        ystar = (0.5 - eps - (1.0 - 2.0 * eps) * pi10) / slope
    cdef Py_ssize_t c, i, j, stop
    cdef double p, pl, ph, mx, v, t
    cdef double tot0, tot1, tot2, car0, car1, car2
    for c in prange(nchunks, nogil=True, schedule="static", num_threads=max(nthreads, 1)):
        tot0 = 0.0
        tot1 = 0.0
        tot2 = 0.0
        car0 = 0.0
        car1 = 0.0
        car2 = 0.0
        stop = (c + 1) * CHUNK
        if stop > n:
            stop = n
        for i in range(c * CHUNK, stop):
            p = prob[i]
            pl = _phi(lo[i], a, pi10, eps)
            ph = _phi(hi[i], a, pi10, eps)
            if flat:
                mx = 1.0
            elif lo[i] <= ystar and ystar <= hi[i]:
                mx = 1.0
            else:
                mx = fmax(pl, ph)
            v = p * _phi(belief[i], a, pi10, eps)
            t = tot0 + v
            if fabs(tot0) >= fabs(v):
                car0 = car0 + ((tot0 - t) + v)
            else:
                car0 = car0 + ((v - t) + tot0)
            tot0 = t
            v = p * fmin(pl, ph)
            t = tot1 + v
            if fabs(tot1) >= fabs(v):
                car1 = car1 + ((tot1 - t) + v)
            else:
                car1 = car1 + ((v - t) + tot1)
            tot1 = t
            v = p * mx
            t = tot2 + v
            if fabs(tot2) >= fabs(v):
                car2 = car2 + ((tot2 - t) + v)
            else:
                car2 = car2 + ((v - t) + tot2)
            tot2 = t
        totals[c, 0] = tot0
        totals[c, 1] = tot1
        totals[c, 2] = tot2
        carries[c, 0] = car0
        carries[c, 1] = car1
        carries[c, 2] = car2
    return totals_a, carries_a
