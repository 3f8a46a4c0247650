# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled elementwise kernels: fused density and phase-factor blocks.

These feed BLAS-backed contractions in the shared driver; the win over the
numpy fallback is fusing the transcendental evaluations and skipping the
intermediate temporaries.  Loops are threaded over independent output rows
(no reductions), so results are bit-identical for any thread count.
"""
import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport cos, sin

cnp.import_array()

cdef extern from "math.h" nogil:
    void sincos(double x, double *s, double *c)

DEF PI = 3.141592653589793


def density_block(double[::1] pcm, double[::1] prel, double[::1] wrel,
                  double[::1] gcm, double p0, double dp2, double pbar2):
    cdef Py_ssize_t ncm = pcm.shape[0], nc = prel.shape[0]
    out = np.empty((ncm, nc), dtype=np.float64)
    cdef double[:, ::1] rho = out
    cdef double k_norm = 2.0 * p0 * pbar2 * pbar2 / (PI * dp2)
    cdef Py_ssize_t i, j
    cdef double q, u, x, sc, gi
    for i in prange(ncm, nogil=True, schedule="static"):
        q = 0.25 * pcm[i] * pcm[i] - p0 * p0
        gi = k_norm * gcm[i]
        for j in range(nc):
            u = q + prel[j] * prel[j]
            x = u / dp2
            if x > 1e-9 or x < -1e-9:
                sc = sin(x) / x
            else:
                sc = 1.0 - x * x / 6.0
            rho[i, j] = gi * sc * sc / ((u + pbar2) * (u + pbar2)) * wrel[j]
    return out


def phase_block(double[::1] prel, double[::1] beta, double[::1] kdiff):
    cdef Py_ssize_t nc = prel.shape[0], nk = kdiff.shape[0]
    out = np.empty((nc, nk), dtype=np.complex128)
    cdef double complex[:, ::1] v = out
    cdef Py_ssize_t j, k
    cdef double arg, s, c
    for j in prange(nc, nogil=True, schedule="static"):
        s = 0.0  # assignments make s, c thread-private (sincos writes by pointer)
        c = 0.0
        for k in range(nk):
            arg = beta[j] + kdiff[k] * prel[j]
            sincos(arg, &s, &c)
            v[j, k] = c + 1j * s
    return out


def fourier_block(double[::1] t, double[::1] omega):
    """exp(i omega_i t_k) as a dense block (the static phase and weights
    are contracted by the driver through BLAS)."""
    cdef Py_ssize_t nt = t.shape[0], nw = omega.shape[0]
    out = np.empty((nw, nt), dtype=np.complex128)
    cdef double complex[:, ::1] v = out
    cdef Py_ssize_t i, k
    cdef double om, s, c
    for i in prange(nw, nogil=True, schedule="static"):
        om = omega[i]
        s = 0.0  # assignments make s, c thread-private (sincos writes by pointer)
        c = 0.0
        for k in range(nt):
            sincos(om * t[k], &s, &c)
            v[i, k] = c + 1j * s
    return out
