# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernels: repeated small dense unitary steps.

The step loop runs without the interpreter; the dense products go to BLAS
through scipy's Cython bindings. Arrays are C-ordered, so BLAS (column
major) sees every matrix transposed and the operation flags account for it.
"""
import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm, zgemv

cnp.import_array()


cdef inline double _guard_ket(double complex[::1] psi, Py_ssize_t dim, Py_ssize_t n_guard) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t n
    for n in range(dim - n_guard, dim):
        s += psi[n].real * psi[n].real + psi[n].imag * psi[n].imag
    return s


cdef inline double _guard_rho(double complex[:, ::1] rho, Py_ssize_t dim, Py_ssize_t n_guard) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t n
    for n in range(dim - n_guard, dim):
        s += rho[n, n].real
    return s


def evolve_ket(psi_in, unitaries, index, Py_ssize_t n_guard, record):
    cdef double complex[::1] psi = np.array(psi_in, dtype=np.complex128)
    cdef double complex[:, :, ::1] us = np.ascontiguousarray(unitaries, dtype=np.complex128)
    cdef long long[::1] idx = np.ascontiguousarray(index, dtype=np.int64)
    cdef long long[::1] rec = np.ascontiguousarray(record, dtype=np.int64)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t nsteps = idx.shape[0]
    cdef Py_ssize_t nrec = rec.shape[0]
    snaps_arr = np.empty((nrec, dim), dtype=np.complex128)
    cdef double complex[:, ::1] snaps = snaps_arr
    cdef double complex[::1] tmp = np.empty(dim, dtype=np.complex128)
    cdef Py_ssize_t step, k, r = 0
    cdef int n = <int>dim, one = 1
    cdef char trans = b'T'
    cdef double complex alpha = 1.0, beta = 0.0
    cdef double guard = 0.0, g

    with nogil:
        while r < nrec and rec[r] == 0:
            snaps[r, :] = psi
            r += 1
        if n_guard > 0:
            guard = _guard_ket(psi, dim, n_guard)
        for step in range(nsteps):
            k = idx[step]
            # tmp = U psi (BLAS sees U^T, hence 'T')
            zgemv(&trans, &n, &n, &alpha, &us[k, 0, 0], &n, &psi[0], &one, &beta, &tmp[0], &one)
            psi[:] = tmp
            if n_guard > 0:
                g = _guard_ket(psi, dim, n_guard)
                if g > guard:
                    guard = g
            while r < nrec and rec[r] == step + 1:
                snaps[r, :] = psi
                r += 1
    return np.asarray(psi), guard, snaps_arr


def evolve_density(rho_in, unitaries, index, keep_in, jump_in, dephase_in,
                   bint decohere, Py_ssize_t n_guard, record):
    cdef double complex[:, ::1] rho = np.array(rho_in, dtype=np.complex128)
    cdef double complex[:, :, ::1] us = np.ascontiguousarray(unitaries, dtype=np.complex128)
    cdef long long[::1] idx = np.ascontiguousarray(index, dtype=np.int64)
    cdef long long[::1] rec = np.ascontiguousarray(record, dtype=np.int64)
    cdef double[::1] keep = np.ascontiguousarray(keep_in, dtype=np.float64)
    cdef double[::1] jump = np.ascontiguousarray(jump_in, dtype=np.float64)
    cdef double[:, ::1] deph = np.ascontiguousarray(dephase_in, dtype=np.float64)
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t nsteps = idx.shape[0]
    cdef Py_ssize_t nrec = rec.shape[0]
    snaps_arr = np.empty((nrec, dim, dim), dtype=np.complex128)
    cdef double complex[:, :, ::1] snaps = snaps_arr
    cdef double complex[:, ::1] tmp = np.empty((dim, dim), dtype=np.complex128)
    cdef Py_ssize_t step, i, j, k, r = 0
    cdef int n = <int>dim
    cdef char tn = b'N', tc = b'C'
    cdef double complex acc, alpha = 1.0, beta = 0.0
    cdef double guard = 0.0, g

    with nogil:
        while r < nrec and rec[r] == 0:
            snaps[r, :, :] = rho
            r += 1
        if n_guard > 0:
            guard = _guard_rho(rho, dim, n_guard)
        for step in range(nsteps):
            k = idx[step]
            # tmp = U rho; column-major this is tmp^T = rho^T U^T
            zgemm(&tn, &tn, &n, &n, &n, &alpha, &rho[0, 0], &n, &us[k, 0, 0], &n, &beta, &tmp[0, 0], &n)
            # rho = tmp U^dag; column-major rho^T = conj(U) tmp^T = (U^T)^dag tmp^T
            zgemm(&tc, &tn, &n, &n, &n, &alpha, &us[k, 0, 0], &n, &tmp[0, 0], &n, &beta, &rho[0, 0], &n)
            # enforce exact Hermiticity
            for i in range(dim):
                rho[i, i] = rho[i, i].real
                for j in range(i):
                    acc = 0.5 * (rho[i, j] + rho[j, i].conjugate())
                    rho[i, j] = acc
                    rho[j, i] = acc.conjugate()
            if decohere:
                for i in range(dim):
                    for j in range(dim):
                        acc = keep[i] * keep[j] * rho[i, j]
                        if i + 1 < dim and j + 1 < dim:
                            acc = acc + jump[i + 1] * jump[j + 1] * rho[i + 1, j + 1]
                        rho[i, j] = acc * deph[i, j]
            if n_guard > 0:
                g = _guard_rho(rho, dim, n_guard)
                if g > guard:
                    guard = g
            while r < nrec and rec[r] == step + 1:
                snaps[r, :, :] = rho
                r += 1
    return np.asarray(rho), guard, snaps_arr
