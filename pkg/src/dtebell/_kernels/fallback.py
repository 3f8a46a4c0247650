"""Pure-numpy implementations of the elementwise hot blocks."""
from __future__ import annotations

import numpy as np


def density_block(pcm: np.ndarray, prel: np.ndarray, wrel: np.ndarray,
                  gcm: np.ndarray, p0: float, dp2: float, pbar2: float) -> np.ndarray:
    """Directional pair-momentum density block rho[i, j] (weights folded in):

    rho_ij = 2 K sinc^2(u/dp2) / (u + pbar2)^2 * gcm_i * wrel_j,
    u = pcm_i^2/4 + prel_j^2 - p0^2,  K = p0 pbar2^2 / (pi dp2).
    """
    k_norm = 2.0 * p0 * pbar2**2 / (np.pi * dp2)
    u = (0.25 * pcm**2 - p0**2)[:, None] + prel[None, :] ** 2
    rho = np.sinc(u / (dp2 * np.pi))
    np.square(rho, out=rho)
    rho *= k_norm / np.square(u + pbar2)
    rho *= gcm[:, None]
    rho *= wrel[None, :]
    return rho


def phase_block(prel: np.ndarray, beta: np.ndarray, kdiff: np.ndarray) -> np.ndarray:
    """V[j, k] = exp(i (beta_j + kdiff_k * prel_j))."""
    arg = beta[:, None] + prel[:, None] * kdiff[None, :]
    out = np.empty(arg.shape, dtype=np.complex128)
    np.cos(arg, out=out.real)
    np.sin(arg, out=out.imag)
    return out


def fourier_block(t: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """exp(i omega_i t_k) as a dense block."""
    arg = np.outer(omega, t)
    out = np.empty(arg.shape, dtype=np.complex128)
    np.cos(arg, out=out.real)
    np.sin(arg, out=out.imag)
    return out
