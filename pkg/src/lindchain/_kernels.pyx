# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernels.

Same contracts as ``_kernels_py``: fixed-step RK4 for the Lindblad matrix
flow and the eigenbasis sandwich propagation.  Matrix products go through
BLAS zgemm; the elementwise work (exponential weights, RK4 combination,
re-Hermitization) runs in C loops without the GIL.
"""

import numpy as np

from scipy.linalg.cython_blas cimport zgemm

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

ctypedef double complex zc


cdef void _mm_ax(int n, const zc* a, const zc* x, zc beta, zc* out) nogil:
    # row-major out = a @ x + beta*out  (column-major zgemm with swapped args)
    cdef char tn = b'N'
    cdef zc one = 1.0
    zgemm(&tn, &tn, &n, &n, &n, &one, <zc*>x, &n, <zc*>a, &n, &beta, out, &n)


cdef void _mm_xad(int n, const zc* x, const zc* a, zc beta, zc* out) nogil:
    # row-major out = x @ a^H + beta*out
    cdef char tc = b'C'
    cdef char tn = b'N'
    cdef zc one = 1.0
    zgemm(&tc, &tn, &n, &n, &n, &one, <zc*>a, &n, <zc*>x, &n, &beta, out, &n)


cdef void _hermitize(int n, zc* x) nogil:
    cdef int i, j
    cdef zc avg
    for i in range(n):
        x[i * n + i] = creal(x[i * n + i])
        for j in range(i + 1, n):
            avg = 0.5 * (x[i * n + j] + conj(x[j * n + i]))
            x[i * n + j] = avg
            x[j * n + i] = conj(avg)


cdef void _lindblad_rhs(int n, const zc* a, const zc* q, bint has_q,
                        const zc* x, zc* k) nogil:
    # k = a @ x + x @ a^H (+ q)
    cdef int i
    _mm_ax(n, a, x, 0.0, k)
    _mm_xad(n, x, a, 1.0, k)
    if has_q:
        for i in range(n * n):
            k[i] = k[i] + q[i]


def rk4_lindblad(const zc[:, ::1] A, Q, const zc[:, ::1] X0, double h,
                 int n_steps):
    """Classical fixed-step RK4 for dX/dt = A X + X A^dag + Q."""
    cdef int n = A.shape[0]
    cdef bint has_q = Q is not None
    cdef const zc[:, ::1] qv
    cdef const zc* qp = NULL
    if has_q:
        qv = Q
        qp = &qv[0, 0]

    out_arr = np.array(X0, dtype=np.complex128, order="C", copy=True)
    cdef zc[:, ::1] X = out_arr
    work = np.empty((5, n, n), dtype=np.complex128)
    cdef zc[:, :, ::1] W = work
    cdef zc* xp = &X[0, 0]
    cdef zc* k1 = &W[0, 0, 0]
    cdef zc* k2 = &W[1, 0, 0]
    cdef zc* k3 = &W[2, 0, 0]
    cdef zc* k4 = &W[3, 0, 0]
    cdef zc* tmp = &W[4, 0, 0]
    cdef const zc* ap = &A[0, 0]
    cdef int step, i
    cdef int nn = n * n
    cdef double h2 = 0.5 * h
    cdef double h6 = h / 6.0

    with nogil:
        for step in range(n_steps):
            _lindblad_rhs(n, ap, qp, has_q, xp, k1)
            for i in range(nn):
                tmp[i] = xp[i] + h2 * k1[i]
            _lindblad_rhs(n, ap, qp, has_q, tmp, k2)
            for i in range(nn):
                tmp[i] = xp[i] + h2 * k2[i]
            _lindblad_rhs(n, ap, qp, has_q, tmp, k3)
            for i in range(nn):
                tmp[i] = xp[i] + h * k3[i]
            _lindblad_rhs(n, ap, qp, has_q, tmp, k4)
            for i in range(nn):
                xp[i] = xp[i] + h6 * (k1[i] + 2.0 * k2[i]
                                      + 2.0 * k3[i] + k4[i])
            _hermitize(n, xp)
    return out_arr


cdef void _weighted(int n, const zc* b0, const zc* lam, double t,
                    zc* out) nogil:
    # out_ij = b0_ij * exp((lam_i + conj(lam_j)) t)
    cdef int i, j
    for i in range(n):
        for j in range(n):
            out[i * n + j] = b0[i * n + j] * cexp((lam[i] + conj(lam[j])) * t)


def sandwich_apply(const zc[:, ::1] W, const zc[:, ::1] B0,
                   const zc[::1] lam, double t):
    """W (exp((lam_i + conj(lam_j)) t) * B0) W^dag, re-Hermitized."""
    cdef int n = W.shape[0]
    out_arr = np.empty((n, n), dtype=np.complex128)
    t1_arr = np.empty((n, n), dtype=np.complex128)
    t2_arr = np.empty((n, n), dtype=np.complex128)
    cdef zc[:, ::1] out = out_arr
    cdef zc[:, ::1] t1 = t1_arr
    cdef zc[:, ::1] t2 = t2_arr
    with nogil:
        _weighted(n, &B0[0, 0], &lam[0], t, &t1[0, 0])
        _mm_ax(n, &W[0, 0], &t1[0, 0], 0.0, &t2[0, 0])
        _mm_xad(n, &t2[0, 0], &W[0, 0], 0.0, &out[0, 0])
        _hermitize(n, &out[0, 0])
    return out_arr


def sandwich_norms(const zc[:, ::1] W, const zc[:, ::1] B0,
                   const zc[::1] lam, const double[::1] times):
    """Frobenius norms of the eigenbasis propagation over a time grid."""
    cdef int n = W.shape[0]
    cdef int nt = times.shape[0]
    out_arr = np.empty(nt, dtype=np.float64)
    cdef double[::1] out = out_arr
    t1_arr = np.empty((n, n), dtype=np.complex128)
    t2_arr = np.empty((n, n), dtype=np.complex128)
    t3_arr = np.empty((n, n), dtype=np.complex128)
    cdef zc[:, ::1] t1 = t1_arr
    cdef zc[:, ::1] t2 = t2_arr
    cdef zc[:, ::1] t3 = t3_arr
    cdef int k, i
    cdef int nn = n * n
    cdef double acc, re, im
    with nogil:
        for k in range(nt):
            _weighted(n, &B0[0, 0], &lam[0], times[k], &t1[0, 0])
            _mm_ax(n, &W[0, 0], &t1[0, 0], 0.0, &t2[0, 0])
            _mm_xad(n, &t2[0, 0], &W[0, 0], 0.0, &t3[0, 0])
            _hermitize(n, &t3[0, 0])
            acc = 0.0
            for i in range(nn):
                re = creal((&t3[0, 0])[i])
                im = cimag((&t3[0, 0])[i])
                acc += re * re + im * im
            out[k] = acc ** 0.5
    return out_arr
