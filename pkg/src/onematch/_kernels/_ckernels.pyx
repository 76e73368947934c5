# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled residual kernels.

Twin of ``_pykernels.py``: identical arithmetic in identical order (the
extension is compiled with -ffp-contract=off), so results are bit-identical
to the numpy fallback. Degenerate inputs yield inf, never exceptions.
"""

from libc.math cimport sqrt, fabs, INFINITY

import numpy as np

BACKEND = "compiled"


def sampson(E, u1, v1, u2, v2):
    cdef double e00 = E[0, 0], e01 = E[0, 1], e02 = E[0, 2]
    cdef double e10 = E[1, 0], e11 = E[1, 1], e12 = E[1, 2]
    cdef double e20 = E[2, 0], e21 = E[2, 1], e22 = E[2, 2]
    cdef double[::1] x1 = np.ascontiguousarray(u1, dtype=np.float64)
    cdef double[::1] y1 = np.ascontiguousarray(v1, dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(u2, dtype=np.float64)
    cdef double[::1] y2 = np.ascontiguousarray(v2, dtype=np.float64)
    cdef Py_ssize_t n = x1.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double a2, b2, c2, a1, b1, e, den
    for i in range(n):
        a2 = (e00 * x1[i] + e01 * y1[i]) + e02
        b2 = (e10 * x1[i] + e11 * y1[i]) + e12
        c2 = (e20 * x1[i] + e21 * y1[i]) + e22
        a1 = (e00 * x2[i] + e10 * y2[i]) + e20
        b1 = (e01 * x2[i] + e11 * y2[i]) + e21
        e = (x2[i] * a2 + y2[i] * b2) + c2
        den = ((a2 * a2 + b2 * b2) + a1 * a1) + b1 * b1
        if den < 1e-15:
            out[i] = INFINITY
        else:
            out[i] = fabs(e) / sqrt(den)
    return out_arr


def symmetric_epipolar(E, u1, v1, u2, v2):
    cdef double e00 = E[0, 0], e01 = E[0, 1], e02 = E[0, 2]
    cdef double e10 = E[1, 0], e11 = E[1, 1], e12 = E[1, 2]
    cdef double e20 = E[2, 0], e21 = E[2, 1], e22 = E[2, 2]
    cdef double[::1] x1 = np.ascontiguousarray(u1, dtype=np.float64)
    cdef double[::1] y1 = np.ascontiguousarray(v1, dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(u2, dtype=np.float64)
    cdef double[::1] y2 = np.ascontiguousarray(v2, dtype=np.float64)
    cdef Py_ssize_t n = x1.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double a2, b2, c2, a1, b1, e, n2sq, n1sq, d1, d2
    for i in range(n):
        a2 = (e00 * x1[i] + e01 * y1[i]) + e02
        b2 = (e10 * x1[i] + e11 * y1[i]) + e12
        c2 = (e20 * x1[i] + e21 * y1[i]) + e22
        a1 = (e00 * x2[i] + e10 * y2[i]) + e20
        b1 = (e01 * x2[i] + e11 * y2[i]) + e21
        e = (x2[i] * a2 + y2[i] * b2) + c2
        n2sq = a2 * a2 + b2 * b2
        n1sq = a1 * a1 + b1 * b1
        if n2sq < 1e-15 or n1sq < 1e-15:
            out[i] = INFINITY
        else:
            d2 = fabs(e) / sqrt(n2sq)
            d1 = fabs(e) / sqrt(n1sq)
            out[i] = sqrt((d1 * d1 + d2 * d2) * 0.5)
    return out_arr


def homography_transfer(H, Hinv, u1, v1, u2, v2):
    cdef double h00 = H[0, 0], h01 = H[0, 1], h02 = H[0, 2]
    cdef double h10 = H[1, 0], h11 = H[1, 1], h12 = H[1, 2]
    cdef double h20 = H[2, 0], h21 = H[2, 1], h22 = H[2, 2]
    cdef double g00 = Hinv[0, 0], g01 = Hinv[0, 1], g02 = Hinv[0, 2]
    cdef double g10 = Hinv[1, 0], g11 = Hinv[1, 1], g12 = Hinv[1, 2]
    cdef double g20 = Hinv[2, 0], g21 = Hinv[2, 1], g22 = Hinv[2, 2]
    cdef double[::1] x1 = np.ascontiguousarray(u1, dtype=np.float64)
    cdef double[::1] y1 = np.ascontiguousarray(v1, dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(u2, dtype=np.float64)
    cdef double[::1] y2 = np.ascontiguousarray(v2, dtype=np.float64)
    cdef Py_ssize_t n = x1.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double w, wb, fx, fy, bx, by
    for i in range(n):
        w = (h20 * x1[i] + h21 * y1[i]) + h22
        wb = (g20 * x2[i] + g21 * y2[i]) + g22
        if fabs(w) < 1e-12 or fabs(wb) < 1e-12:
            out[i] = INFINITY
        else:
            fx = ((h00 * x1[i] + h01 * y1[i]) + h02) / w - x2[i]
            fy = ((h10 * x1[i] + h11 * y1[i]) + h12) / w - y2[i]
            bx = ((g00 * x2[i] + g01 * y2[i]) + g02) / wb - x1[i]
            by = ((g10 * x2[i] + g11 * y2[i]) + g12) / wb - y1[i]
            out[i] = sqrt((((fx * fx + fy * fy) + bx * bx) + by * by) * 0.5)
    return out_arr
