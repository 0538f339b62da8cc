# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise Menger density kernels (same API as ``_kernels_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, isfinite

cnp.import_array()

BACKEND = "cython"


cdef inline double _t_factor(double sp, double W2, double s, double AA, double BB, double CC,
                             double p, double q) nogil:
    cdef double t
    if AA <= 0 or BB <= 0 or CC <= 0:
        return 0.0
    t = sp * pow(W2, 0.5 * q - 1.0) / pow(s, q) / pow(AA * BB * CC, 0.5 * p)
    if not isfinite(t):
        return 0.0
    return t


def menger_density(double[:, :, ::1] A, double[:, :, ::1] B, double[:, :, ::1] P2,
                   double[:, :, ::1] P3, double[::1] sp1, double[::1] a, double[::1] b,
                   double p, double q):
    cdef Py_ssize_t nb = A.shape[0], n = A.shape[1], M = A.shape[2]
    cdef Py_ssize_t k, i, j, m
    cdef double s, AA, BB, CC, W2, d, c, sp2, sp3, ak, bk
    out = np.zeros((nb, M))
    cdef double[:, ::1] S = out
    with nogil:
        for k in range(nb):
            ak = a[k]
            bk = b[k]
            s = ak + bk
            for m in range(M):
                AA = 0
                BB = 0
                CC = 0
                sp2 = 0
                sp3 = 0
                W2 = 0
                for i in range(n):
                    AA = AA + A[k, i, m] * A[k, i, m]
                    BB = BB + B[k, i, m] * B[k, i, m]
                    c = (bk * B[k, i, m] + ak * A[k, i, m]) / s
                    CC = CC + c * c
                    sp2 = sp2 + P2[k, i, m] * P2[k, i, m]
                    sp3 = sp3 + P3[k, i, m] * P3[k, i, m]
                    for j in range(i + 1, n):
                        d = A[k, i, m] * B[k, j, m] - A[k, j, m] * B[k, i, m]
                        W2 = W2 + d * d
                S[k, m] = W2 * _t_factor(sp1[m] * sqrt(sp2 * sp3), W2, s, AA, BB, CC, p, q)
    return out


def menger_density_grad(double[:, :, ::1] A, double[:, :, ::1] B, double[:, ::1] P1,
                        double[:, :, ::1] P2, double[:, :, ::1] P3, double[::1] sp1,
                        double[::1] a, double[::1] b, double p, double q):
    cdef Py_ssize_t nb = A.shape[0], n = A.shape[1], M = A.shape[2]
    cdef Py_ssize_t k, i, j, m
    cdef double s, AA, BB, CC, AB, W2, d, c, sp2, sp3, ak, bk, T, Sv, rA, rB, rC, ta, tb
    S_arr = np.zeros((nb, M))
    gA_arr = np.zeros((nb, n, M))
    gB_arr = np.zeros((nb, n, M))
    gP1_arr = np.zeros((nb, n, M))
    gP2_arr = np.zeros((nb, n, M))
    gP3_arr = np.zeros((nb, n, M))
    cdef double[:, ::1] S = S_arr
    cdef double[:, :, ::1] gA = gA_arr
    cdef double[:, :, ::1] gB = gB_arr
    cdef double[:, :, ::1] gP1 = gP1_arr
    cdef double[:, :, ::1] gP2 = gP2_arr
    cdef double[:, :, ::1] gP3 = gP3_arr
    with nogil:
        for k in range(nb):
            ak = a[k]
            bk = b[k]
            s = ak + bk
            ta = ak / s
            tb = bk / s
            for m in range(M):
                AA = 0
                BB = 0
                CC = 0
                AB = 0
                sp2 = 0
                sp3 = 0
                W2 = 0
                for i in range(n):
                    AA = AA + A[k, i, m] * A[k, i, m]
                    BB = BB + B[k, i, m] * B[k, i, m]
                    AB = AB + A[k, i, m] * B[k, i, m]
                    c = (bk * B[k, i, m] + ak * A[k, i, m]) / s
                    CC = CC + c * c
                    sp2 = sp2 + P2[k, i, m] * P2[k, i, m]
                    sp3 = sp3 + P3[k, i, m] * P3[k, i, m]
                    for j in range(i + 1, n):
                        d = A[k, i, m] * B[k, j, m] - A[k, j, m] * B[k, i, m]
                        W2 = W2 + d * d
                sp2 = sqrt(sp2)
                sp3 = sqrt(sp3)
                T = _t_factor(sp1[m] * sp2 * sp3, W2, s, AA, BB, CC, p, q)
                Sv = T * W2
                S[k, m] = Sv
                if Sv == 0:
                    continue
                rA = p * Sv / AA
                rB = p * Sv / BB
                rC = p * Sv / CC
                for i in range(n):
                    c = (bk * B[k, i, m] + ak * A[k, i, m]) / s
                    gA[k, i, m] = q * T * (BB * A[k, i, m] - AB * B[k, i, m]) - rA * A[k, i, m] - ta * rC * c
                    gB[k, i, m] = q * T * (AA * B[k, i, m] - AB * A[k, i, m]) - rB * B[k, i, m] - tb * rC * c
                    gP1[k, i, m] = Sv * P1[i, m] / (sp1[m] * sp1[m])
                    gP2[k, i, m] = Sv * P2[k, i, m] / (sp2 * sp2)
                    gP3[k, i, m] = Sv * P3[k, i, m] / (sp3 * sp3)
    return S_arr, gA_arr, gB_arr, gP1_arr, gP2_arr, gP3_arr
