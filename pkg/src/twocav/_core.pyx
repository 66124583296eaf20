# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels: affine rate systems and Lindblad density matrices.

Mirrors twocav._core_py; the density-matrix path runs on BLAS zgemm with
preallocated buffers, the affine path on plain C loops (k <= 16).
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

COMPILED = True


cdef inline void _zmm(int n, double complex alpha, double complex* a,
                      double complex* b, double complex beta,
                      double complex* c) noexcept nogil:
    # c <- alpha*a@b + beta*c for n x n row-major buffers; swapping the
    # operands maps the row-major product onto Fortran-order zgemm.
    cdef char tn = 78  # 'N'
    zgemm(&tn, &tn, &n, &n, &n, &alpha, b, &n, a, &n, &beta, c, &n)


cdef void _lindblad_rhs(int d, int n_ops, double complex* g,
                        double complex* gh, double complex* cs,
                        double complex* chs, double complex* rho,
                        double complex* tmp, double complex* out) noexcept nogil:
    cdef int k
    cdef Py_ssize_t block = <Py_ssize_t> d * d
    _zmm(d, -1.0, g, rho, 0.0, out)
    _zmm(d, -1.0, rho, gh, 1.0, out)
    for k in range(n_ops):
        _zmm(d, 1.0, cs + k * block, rho, 0.0, tmp)
        _zmm(d, 1.0, tmp, chs + k * block, 1.0, out)


def rk4_lindblad(object g_in, object gh_in, object cs_in, object chs_in,
                 object rho0, double dt, long n_steps, long record_stride):
    """RK4 for rho' = -(g rho + rho gh) + sum_k cs[k] rho chs[k]."""
    if n_steps % record_stride:
        raise ValueError("record_stride must divide n_steps")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] g = \
        np.ascontiguousarray(g_in, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] gh = \
        np.ascontiguousarray(gh_in, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] cs = \
        np.ascontiguousarray(cs_in, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] chs = \
        np.ascontiguousarray(chs_in, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] rho = \
        np.array(rho0, dtype=np.complex128, order="C")
    cdef int d = rho.shape[0]
    cdef int n_ops = cs.shape[0]
    cdef Py_ssize_t block = <Py_ssize_t> d * d
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = \
        np.empty((n_steps // record_stride + 1, d, d), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] k = np.empty_like(rho)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tmp = np.empty_like(rho)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] stage = np.empty_like(rho)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] acc = np.empty_like(rho)
    cdef double complex* pg = &g[0, 0]
    cdef double complex* pgh = &gh[0, 0]
    cdef double complex* pcs = NULL
    cdef double complex* pchs = NULL
    if n_ops:
        pcs = &cs[0, 0, 0]
        pchs = &chs[0, 0, 0]
    cdef double complex* prho = &rho[0, 0]
    cdef double complex* pk = &k[0, 0]
    cdef double complex* ptmp = &tmp[0, 0]
    cdef double complex* pstage = &stage[0, 0]
    cdef double complex* pacc = &acc[0, 0]
    cdef double complex* pout = &out[0, 0, 0]
    cdef double h = dt
    cdef long step
    cdef Py_ssize_t i, rec = 1
    for i in range(block):
        pout[i] = prho[i]
    with nogil:
        for step in range(1, n_steps + 1):
            _lindblad_rhs(d, n_ops, pg, pgh, pcs, pchs, prho, ptmp, pk)
            for i in range(block):
                pacc[i] = prho[i] + (h / 6.0) * pk[i]
                pstage[i] = prho[i] + (0.5 * h) * pk[i]
            _lindblad_rhs(d, n_ops, pg, pgh, pcs, pchs, pstage, ptmp, pk)
            for i in range(block):
                pacc[i] = pacc[i] + (h / 3.0) * pk[i]
                pstage[i] = prho[i] + (0.5 * h) * pk[i]
            _lindblad_rhs(d, n_ops, pg, pgh, pcs, pchs, pstage, ptmp, pk)
            for i in range(block):
                pacc[i] = pacc[i] + (h / 3.0) * pk[i]
                pstage[i] = prho[i] + h * pk[i]
            _lindblad_rhs(d, n_ops, pg, pgh, pcs, pchs, pstage, ptmp, pk)
            for i in range(block):
                prho[i] = pacc[i] + (h / 6.0) * pk[i]
            if step % record_stride == 0:
                for i in range(block):
                    pout[rec * block + i] = prho[i]
                rec += 1
    return out


def rk4_affine(object a_in, object b_in, object y0, double dt, long n_steps,
               long record_stride):
    """RK4 for y' = a @ y + b; a is k x k with k <= 16."""
    if n_steps % record_stride:
        raise ValueError("record_stride must divide n_steps")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = \
        np.ascontiguousarray(a_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = \
        np.ascontiguousarray(b_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = \
        np.array(y0, dtype=np.float64)
    cdef int k = y.shape[0]
    if k > 16 or a.shape[0] != k or a.shape[1] != k or b.shape[0] != k:
        raise ValueError("rk4_affine expects matching system size <= 16")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = \
        np.empty((n_steps // record_stride + 1, k))
    cdef double[16] k1, k2, k3, k4, stage, acc
    cdef double* pa = &a[0, 0]
    cdef double* pb = &b[0]
    cdef double* py = &y[0]
    cdef double* pout = &out[0, 0]
    cdef double h = dt
    cdef long step
    cdef Py_ssize_t i, j, rec = 1
    cdef double s
    for i in range(k):
        pout[i] = py[i]
    with nogil:
        for step in range(1, n_steps + 1):
            for i in range(k):
                s = pb[i]
                for j in range(k):
                    s += pa[i * k + j] * py[j]
                k1[i] = s
            for i in range(k):
                stage[i] = py[i] + (0.5 * h) * k1[i]
            for i in range(k):
                s = pb[i]
                for j in range(k):
                    s += pa[i * k + j] * stage[j]
                k2[i] = s
            for i in range(k):
                stage[i] = py[i] + (0.5 * h) * k2[i]
            for i in range(k):
                s = pb[i]
                for j in range(k):
                    s += pa[i * k + j] * stage[j]
                k3[i] = s
            for i in range(k):
                stage[i] = py[i] + h * k3[i]
            for i in range(k):
                s = pb[i]
                for j in range(k):
                    s += pa[i * k + j] * stage[j]
                k4[i] = s
            for i in range(k):
                acc[i] = py[i] + (h / 6.0) * k1[i]
                acc[i] = acc[i] + (h / 3.0) * k2[i]
                acc[i] = acc[i] + (h / 3.0) * k3[i]
                py[i] = acc[i] + (h / 6.0) * k4[i]
            if step % record_stride == 0:
                for i in range(k):
                    pout[rec * k + i] = py[i]
                rec += 1
    return out
