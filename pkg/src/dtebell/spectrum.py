"""Two-particle momentum spectrum of the dissociated pair.

The single-pulse amplitude in (p_cm, p_rel), normalized in the
narrow-peak approximation, is

    <p|Psi0> = sqrt(p0) pbar^2 sinc[(p_cm^2/4 + p_rel^2 - p0^2)/dp^2]
               / (sqrt(pi) dp (p_cm^2/4 + p_rel^2 - p0^2 + pbar^2))
               * <p_cm|psi_T>,

with psi_T the real Gaussian ground state of the longitudinal trap.  It is
sharply peaked at (0, +-p0); the directional state keeps p_rel > 0 with a
compensating factor 2.  Grids sampled from it are renormalized numerically,
so downstream consumers see unit norm regardless of the approximation.

Width bookkeeping: second moments of the sinc-shaped marginal diverge and
are never used; widths are reported through dp and sigma_p itself, plus the
two Gaussian fits (plain least squares, and a conservative upper-envelope
variant that tends to sit wider).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares

from . import quadrature
from .feshbach import DerivedScales, ResonanceParams
from .quadrature import IntegrationPlan
from .units import CONSTANTS

__all__ = [
    "TrapGroundState", "SpectrumGrid", "NormResult", "GaussianFit", "WindowError",
    "single_pulse_amplitude", "norm_closed_form", "norm_cross_check",
    "dissociation_probability", "build_grid", "gaussian_fit",
]

_HBAR = CONSTANTS.hbar


class WindowError(ValueError):
    """Grid window too small: normalization deficit above threshold."""

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = deficit


@dataclass(frozen=True)
class TrapGroundState:
    """Longitudinal trap ground state in the harmonic approximation."""

    omega: float  # rad/s
    mass: float   # kg

    def __post_init__(self):
        if self.omega <= 0 or self.mass <= 0:
            raise ValueError("trap frequency and mass must be > 0")

    @property
    def sigma_p(self) -> float:
        """Amplitude width of <p|psi_T>: sigma_p = sqrt(hbar omega m)."""
        return math.sqrt(_HBAR * self.omega * self.mass)

    def amplitude(self, p: np.ndarray) -> np.ndarray:
        """Real, positive, L2-normalized momentum amplitude."""
        s = self.sigma_p
        return (math.pi * s * s) ** (-0.25) * np.exp(-np.square(p) / (2.0 * s * s))

    def density(self, p: np.ndarray) -> np.ndarray:
        s = self.sigma_p
        return np.exp(-np.square(p) / (s * s)) / (math.sqrt(math.pi) * s)


def single_pulse_amplitude(scales: DerivedScales, trap: TrapGroundState,
                           p_cm, p_rel) -> np.ndarray:
    """<p_cm, p_rel | Psi0> (real; sign carried by the sinc lobes)."""
    if not scales.p_bar > scales.p0:
        raise ValueError("requires p_bar > p0 (nonvanishing denominator)")
    p_cm = np.asarray(p_cm, dtype=float)
    p_rel = np.asarray(p_rel, dtype=float)
    dp2 = scales.delta_p**2
    u = 0.25 * p_cm**2 + p_rel**2 - scales.p0**2
    return (math.sqrt(scales.p0) * scales.p_bar**2
            * np.sinc(u / (dp2 * math.pi))
            / (math.sqrt(math.pi) * scales.delta_p * (u + scales.p_bar**2))
            * trap.amplitude(p_cm))


def norm_closed_form(scales: DerivedScales) -> float:
    """Closed-form squared norm of C~ for the double sequence:
    2 pi T^2 dp^2 / p0."""
    return 2.0 * math.pi * scales.pulse_duration**2 * scales.delta_p**2 / scales.p0


@dataclass(frozen=True)
class NormResult:
    numeric: float
    closed_form: float

    @property
    def relative_difference(self) -> float:
        return self.numeric / self.closed_form - 1.0


def norm_cross_check(scales: DerivedScales, trap: TrapGroundState,
                     rel_window_lobes: int = 48,
                     plan: Optional[IntegrationPlan] = None) -> NormResult:
    """Numeric squared norm against the closed form.

    Integrates the single-pulse |C~(p)|^2 |psi_T(p_cm)|^2 over momentum
    space (the double sequence contributes twice that in the tau >> T
    limit) and compares with the closed form.  In momentum variables
    C~(p) = T pbar^2 sinc[u/dp^2] / (u + pbar^2).
    """
    T = scales.pulse_duration
    dp2 = scales.delta_p**2
    pbar2 = scales.p_bar**2
    p0 = scales.p0
    lobe = math.pi * dp2 / (2.0 * p0)
    width = rel_window_lobes * lobe

    def integrand(p_cm, p_rel):
        u = 0.25 * p_cm**2 + p_rel**2 - p0**2
        c = T * pbar2 * np.sinc(u / (dp2 * math.pi)) / (u + pbar2)
        return c * c * trap.density(p_cm)

    plan = plan or IntegrationPlan(panels=(48, 6 * rel_window_lobes),
                                   tolerance=1e-6, max_refinements=2)
    sig = trap.sigma_p
    # even in p_rel: integrate the +p0 peak's half line and double
    value, _ = quadrature.integrate_2d(
        integrand, (-8.0 * sig, 8.0 * sig, max(0.0, p0 - width), p0 + width), plan)
    numeric = 2.0 * 2.0 * float(value.real)  # both p_rel signs, two pulses
    return NormResult(numeric=numeric, closed_form=norm_closed_form(scales))


def dissociation_probability(scales: DerivedScales, res: ResonanceParams,
                             guide_frequency: float) -> float:
    """|C_bg|^2 = w_G a_bg mu dB_width ||C~||^2 / (pi hbar^2), closed-form norm.

    Warns when the result leaves the weak-coupling regime.
    """
    prob = (guide_frequency * res.background_length * res.moment_difference
            * res.width * norm_closed_form(scales) / (math.pi * _HBAR**2))
    if prob > 0.5:
        warnings.warn(f"dissociation probability {prob:.2f} violates the "
                      "weak-coupling assumption", stacklevel=2)
    return prob


def _axis_through(anchor: float, lo: float, hi: float, n: int) -> np.ndarray:
    """Uniform axis of ~n points over [lo, hi] with `anchor` exactly on a node."""
    if not (lo <= anchor <= hi):
        return np.linspace(lo, hi, n)
    n_lo = max(int(round((n - 1) * (anchor - lo) / (hi - lo))), 0)
    n_hi = (n - 1) - n_lo
    step = (hi - lo) / (n - 1)
    if n_lo > 0:
        step = min(step, (anchor - lo) / n_lo)
    if n_hi > 0:
        step = min(step, (hi - anchor) / n_hi)
    return anchor + step * np.arange(-n_lo, n_hi + 1)


@dataclass
class SpectrumGrid:
    """Sampled directional spectrum around the (0, +p0) peak.

    `amplitude` is real (sign from the sinc lobes), scaled so that
    sum(amplitude^2) * cell area = 1.  The window is recorded in units of
    sigma_p (cm) and delta_p (rel); `deficit` is the measured fraction of
    the directional norm lying outside the window.
    """

    p_cm_axis: np.ndarray
    p_rel_axis: np.ndarray
    amplitude: np.ndarray          # shape (n_cm, n_rel)
    scales: DerivedScales
    trap: TrapGroundState
    window: Tuple[float, float]    # (n_sigma_cm, n_delta_p_rel)
    deficit: float

    @property
    def density(self) -> np.ndarray:
        return self.amplitude**2

    @property
    def cell_area(self) -> float:
        return float((self.p_cm_axis[1] - self.p_cm_axis[0])
                     * (self.p_rel_axis[1] - self.p_rel_axis[0]))

    @property
    def peak_indices(self) -> Tuple[int, int]:
        return tuple(np.unravel_index(np.argmax(self.density), self.density.shape))

    @property
    def rel_bounds(self) -> Tuple[float, float]:
        return float(self.p_rel_axis[0]), float(self.p_rel_axis[-1])

    @property
    def cm_bounds(self) -> Tuple[float, float]:
        return float(self.p_cm_axis[0]), float(self.p_cm_axis[-1])


def _directional_window_integral(scales: DerivedScales, trap: TrapGroundState,
                                 cm_hw: float, rel_lo: float, rel_hi: float,
                                 panels_scale: int = 3) -> float:
    """Integral of 2 theta(p_rel) |<p|Psi0>|^2 over the given window (GL)."""
    p0, dp2 = scales.p0, scales.delta_p**2
    lobe = math.pi * dp2 / (2.0 * p0)
    n_rel = max(int((rel_hi - rel_lo) / lobe) * panels_scale, 32)
    n_cm = 48

    def dens(p_cm, p_rel):
        a = single_pulse_amplitude(scales, trap, p_cm, p_rel)
        return 2.0 * a * a

    xn, xw = quadrature.gl_nodes(np.linspace(-cm_hw, cm_hw, n_cm + 1), 10)
    yn, yw = quadrature.gl_nodes(np.linspace(rel_lo, rel_hi, n_rel + 1), 10)
    total = 0.0
    for s in range(0, xn.size, 128):
        vals = dens(xn[s:s + 128, None], yn[None, :])
        total += float(np.einsum("i,j,ij->", xw[s:s + 128], yw, vals))
    return total


def build_grid(scales: DerivedScales, trap: TrapGroundState,
               window_sigmas: Tuple[float, float] = (6.0, 16.0),
               points: Tuple[int, int] = (257, 1025),
               deficit_threshold: float = 1e-3) -> SpectrumGrid:
    """Sample, renormalize and window the directional spectrum.

    `window_sigmas` = (half-width in units of sigma_p along p_cm, half-width
    in units of delta_p along p_rel).  The p_rel window must cover at least
    8 sinc side lobes; it is clipped at p_rel = 0 where the directional
    state ends.  The deficit (norm outside the window, measured against a
    doubled window) must stay below `deficit_threshold` -- the fringe
    envelope is tail-sensitive, so an undersized window is an error, not a
    warning.
    """
    n_sig_cm, n_dp_rel = window_sigmas
    p0, dp = scales.p0, scales.delta_p
    lobe_width = math.pi * dp**2 / (2.0 * p0)
    if n_dp_rel * dp < 8.0 * lobe_width:
        raise ValueError("p_rel window must cover at least 8 sinc side lobes")
    if points[0] < 3 or points[1] < 3:
        raise ValueError("need at least 3 points per axis")

    cm_hw = n_sig_cm * trap.sigma_p
    rel_lo = max(0.0, p0 - n_dp_rel * dp)
    rel_hi = p0 + n_dp_rel * dp

    p_cm_axis = _axis_through(0.0, -cm_hw, cm_hw, points[0])
    p_rel_axis = _axis_through(p0, rel_lo, rel_hi, points[1])

    inside = _directional_window_integral(scales, trap, cm_hw, rel_lo, rel_hi)
    extended = _directional_window_integral(
        scales, trap, cm_hw + 2.0 * trap.sigma_p,
        max(0.0, p0 - 2.0 * n_dp_rel * dp), p0 + 2.0 * n_dp_rel * dp)
    deficit = max(1.0 - inside / extended, 0.0)
    if deficit > deficit_threshold:
        raise WindowError(
            f"window misses {deficit:.2e} of the directional norm "
            f"(threshold {deficit_threshold:g}); widen window_sigmas", deficit)

    amp = single_pulse_amplitude(scales, trap, p_cm_axis[:, None], p_rel_axis[None, :])
    amp = amp * np.sqrt(2.0)  # directional factor 2 theta(p_rel)
    cell = (p_cm_axis[1] - p_cm_axis[0]) * (p_rel_axis[1] - p_rel_axis[0])
    norm = float(np.sum(amp * amp) * cell)
    amp /= math.sqrt(norm)
    return SpectrumGrid(p_cm_axis=p_cm_axis, p_rel_axis=p_rel_axis, amplitude=amp,
                        scales=scales, trap=trap,
                        window=(float(n_sig_cm), float(n_dp_rel)), deficit=deficit)


@dataclass(frozen=True)
class GaussianFit:
    center_cm: float
    center_rel: float
    sigma_cm: float
    sigma_rel: float
    amplitude: float

    def evaluate(self, p_cm, p_rel) -> np.ndarray:
        return self.amplitude * np.exp(
            -0.5 * ((np.asarray(p_cm) - self.center_cm) / self.sigma_cm) ** 2
            - 0.5 * ((np.asarray(p_rel) - self.center_rel) / self.sigma_rel) ** 2)


def _fit_gaussian(pc, pr, dens, one_sided_weight: Optional[float]) -> GaussianFit:
    """Fit a * gauss(pc; c1, s1) * gauss(pr; c2, s2) in nondimensional
    variables (SI scales would wreck the optimizer's conditioning)."""
    pc_scale = max(np.std(pc), 1e-300)
    pr_off = pr[np.argmax(dens)]
    pr_scale = max(np.std(pr - pr_off), 1e-300)
    d_scale = dens.max()
    x = pc / pc_scale
    y = (pr - pr_off) / pr_scale
    d = dens / d_scale

    def residuals(theta):
        a, c1, c2, s1, s2 = theta
        model = a * np.exp(-0.5 * ((x - c1) / s1) ** 2 - 0.5 * ((y - c2) / s2) ** 2)
        r = model - d
        if one_sided_weight is not None:
            r = np.where(r < 0, r * one_sided_weight, r)
        return r

    res = least_squares(residuals, np.array([1.0, 0.0, 0.0, 0.5, 0.5]),
                        method="lm", max_nfev=2000)
    if not np.isfinite(res.cost):
        raise ArithmeticError(f"Gaussian fit did not converge: {res.message}")
    a, c1, c2, s1, s2 = res.x
    return GaussianFit(center_cm=c1 * pc_scale, center_rel=pr_off + c2 * pr_scale,
                       sigma_cm=abs(s1) * pc_scale, sigma_rel=abs(s2) * pr_scale,
                       amplitude=a * d_scale)


def gaussian_fit(grid: SpectrumGrid) -> Dict[str, GaussianFit]:
    """Gaussian fits of the directional density.

    Returns the plain least-squares fit and an upper-envelope variant where
    undershooting the data is penalized 100x, which pushes the model toward
    a conservative cover of the peak (and to larger widths).
    """
    dens = grid.density
    keep = dens > 1e-8 * dens.max()
    PC, PR = np.meshgrid(grid.p_cm_axis, grid.p_rel_axis, indexing="ij")
    pc, pr, dv = PC[keep], PR[keep], dens[keep]
    return {
        "least_squares": _fit_gaussian(pc, pr, dv, None),
        "upper_envelope": _fit_gaussian(pc, pr, dv, 100.0),
    }
