"""Hot numerical kernels: compiled elementwise core + numpy fallback.

The heavy contraction always runs through BLAS; the two backends differ in
how the transcendental-heavy blocks (density, phase factors, Fourier sums)
are evaluated.  The compiled Cython extension is selected at import time
when present; set ``DTEBELL_DISABLE_EXT=1`` to force the numpy fallback
(used by the benchmark and the equivalence tests).

Driver contract:

correlation_moments(pcm, prel, wrel, gcm, beta, kdiff, p0, dp2, pbar2)
    Streams the directional density
    rho_ij = 2 K sinc^2(u/dp2)/(u + pbar2)^2 * gcm_i * wrel_j,
    u = pcm_i^2/4 + prel_j^2 - p0^2, K = p0 pbar2^2/(pi dp2),
    and returns (M, R):
    M[i, k] = sum_j rho_ij exp(i (beta_j + kdiff_k prel_j)),
    R[i]    = sum_j rho_ij.

fourier_sums(t, w, phase, omega)
    sum_k w_k exp(i (omega t_k - phase_k)) for each omega (backends supply
    the exp(i omega t) blocks; the weighted sum is a BLAS matvec).
"""
import importlib as _importlib
import os as _os

import numpy as _np

from . import fallback as _fallback

_core = None
if _os.environ.get("DTEBELL_DISABLE_EXT", "0") in ("", "0"):
    try:
        _core = _importlib.import_module("._core", __name__)
    except ImportError:
        _core = None

_impl = _core if _core is not None else _fallback
HAVE_EXT = _core is not None
BACKEND = "compiled" if HAVE_EXT else "numpy"

_CHUNK = 4096


def correlation_moments(pcm, prel, wrel, gcm, beta, kdiff,
                        p0: float, dp2: float, pbar2: float,
                        impl=None):
    """See module docstring.  `impl` overrides the backend (benchmarks)."""
    impl = impl or _impl
    pcm = _np.ascontiguousarray(pcm, dtype=_np.float64)
    prel = _np.ascontiguousarray(prel, dtype=_np.float64)
    wrel = _np.ascontiguousarray(wrel, dtype=_np.float64)
    gcm = _np.ascontiguousarray(gcm, dtype=_np.float64)
    beta = _np.ascontiguousarray(beta, dtype=_np.float64)
    kdiff = _np.ascontiguousarray(kdiff, dtype=_np.float64)

    M = _np.zeros((pcm.size, kdiff.size), dtype=_np.complex128)
    R = _np.zeros(pcm.size)
    for s in range(0, prel.size, _CHUNK):
        sl = slice(s, min(s + _CHUNK, prel.size))
        rho = impl.density_block(pcm, prel[sl], wrel[sl], gcm, p0, dp2, pbar2)
        R += rho.sum(axis=1)
        V = impl.phase_block(prel[sl], beta[sl], kdiff)
        M += rho @ V
    return M, R


def fourier_sums(t, w, phase, omega, impl=None):
    impl = impl or _impl
    t = _np.ascontiguousarray(t, dtype=_np.float64)
    omega = _np.ascontiguousarray(omega, dtype=_np.float64)
    static = _np.asarray(w, float) * _np.exp(-1j * _np.asarray(phase, float))
    out = _np.zeros(omega.shape, complex)
    for s in range(0, t.size, 16 * _CHUNK):
        sl = slice(s, min(s + 16 * _CHUNK, t.size))
        out += impl.fourier_block(t[sl], omega) @ static[sl]
    return out


__all__ = ["fourier_sums", "correlation_moments", "BACKEND", "HAVE_EXT"]
