# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled twins of the _pure kernels; same signatures, C loops.

cdivision keeps IEEE semantics for the Moebius ratio: a zero
denominator yields a signed infinity, which arctan folds back to
-+pi/2 exactly as the branch algebra requires.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, atan, cos, floor, sin, tan

cnp.import_array()

MAX_ITER = 10**6


cdef inline double _core(double tau, double T, double a, double b,
                         double c, double d, bint half, double c0,
                         double c1, double q) noexcept nogil:
    cdef double x = tau / T
    cdef double k
    if half:
        k = floor(x + 0.5)
    else:
        k = floor(x)
    cdef double v = tan(M_PI * (x - k))
    cdef double w = (a * v + b) / (c * v + d)
    cdef double br = k + c0
    if c1 != 0.0 and v >= q:
        br += c1
    return (T / M_PI) * atan(w) + br * T


def phase_map(double[::1] tau, double T, double a, double b, double c,
              double d, bint half, double c0, double c1, double q,
              double edge, double shift):
    cdef Py_ssize_t i, n = tau.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            if tau[i] < edge:
                out[i] = tau[i] + shift
            else:
                out[i] = _core(tau[i], T, a, b, c, d, half, c0, c1, q)
    return out_arr


def moore_map(double[::1] tau, double L, double T, double a, double b,
              double c, double d, bint half, double c0, double c1,
              double q):
    cdef Py_ssize_t i, n = tau.shape[0]
    cdef long cap = MAX_ITER
    R_arr = np.empty(n, dtype=np.float64)
    n_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] R = R_arr
    cdef cnp.int64_t[::1] cnt = n_arr
    cdef double cur
    cdef long k
    cdef bint overflow = 0
    with nogil:
        for i in range(n):
            cur = tau[i]
            k = 0
            while cur >= L:
                cur = _core(cur, T, a, b, c, d, half, c0, c1, q)
                k += 1
                if k >= cap:
                    overflow = 1
                    break
            if overflow:
                break
            R[i] = cur - 2.0 * L + 2.0 * L * k
            cnt[i] = k
    if overflow:
        raise RuntimeError("map iteration cap exceeded")
    return R_arr, n_arr


def bracket_vals(double[::1] tau, double T, cnp.int64_t[::1] idx,
                 double[:, ::1] svdtab):
    cdef Py_ssize_t i, n = tau.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double x, k, phi, s, cph, p, q
    cdef Py_ssize_t j
    with nogil:
        for i in range(n):
            x = tau[i] / T
            k = floor(x + 0.5)
            phi = M_PI * (x - k)
            s = sin(phi)
            cph = cos(phi)
            j = idx[i]
            p = svdtab[j, 0] * (svdtab[j, 2] * s + svdtab[j, 3] * cph)
            q = svdtab[j, 1] * (svdtab[j, 4] * s + svdtab[j, 5] * cph)
            out[i] = (svdtab[j, 6] * svdtab[j, 0] * svdtab[j, 1]
                      / (p * p + q * q))
    return out_arr
