"""Joint detection statistics behind the switched asymmetric interferometers.

For path-length differences (l1, l2) applied to the early components, the
probability of finding the pair in output ports (s1, s2), s_i = +-1, is

    P(s1, s2 | l1, l2) = 1/4 [1 + s1 s2 Re{ e^{-i phi_tau} F(l1, l2) }],

    F = Int dp_cm dp_rel rho+(p_cm, p_rel)
        exp(i p_cm (l1+l2)/(2 hbar) + i p_rel (l1-l2)/hbar
            - i tau (p_cm^2/4 + p_rel^2)/(m hbar)),

with rho+ the normalized directional momentum density.  F is computed as a
ratio of two sums over the same phase-aware Gauss-Legendre nodes, so
F = 1 holds exactly for a phaseless integrand and |F| <= 1 structurally
(positive weights, nonnegative density).

The only visibility killer is the tau-quadratic term: it encodes the extra
free evolution of the early components between the two dissociations.  Any
common evolution after the second pulse drops out, which is why the fringe
pattern survives arbitrarily long propagation.

Convention for scans: l1 = ell_0 + delta_l, l2 = -ell_0, with
ell_0 = tau p0/m the optimum-overlap difference.  phi_tau shifts the
fringes but never |F|; scans default it to 0 and report it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import quadrature
from ._kernels import correlation_moments
from .feshbach import DerivedScales
from .quadrature import IntegrationPlan
from .spectrum import SpectrumGrid
from .units import CONSTANTS

__all__ = [
    "PathSettings", "FringeScan", "ChshSettings", "CorrelationEvaluator",
    "correlation_integral", "joint_probability", "fringe_scan", "visibility",
    "fringe_metrics", "chsh_value", "standard_chsh_settings", "chsh_scan",
    "PORT_PAIRS", "BELL_THRESHOLD", "TSIRELSON_BOUND",
]

_HBAR = CONSTANTS.hbar

PORT_PAIRS: Tuple[Tuple[int, int], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))
BELL_THRESHOLD = 1.0 / math.sqrt(2.0)
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class PathSettings:
    """Path-length differences applied by the two interferometers (m)."""

    ell_1: float
    ell_2: float

    def __post_init__(self):
        if not (math.isfinite(self.ell_1) and math.isfinite(self.ell_2)):
            raise ValueError("path settings must be finite")


class CorrelationEvaluator:
    """Evaluates F for batches of (l1, l2) settings over a grid's window.

    Node layout is rebuilt per batch from the actual phase rates (the
    tau-quadratic term plus the requested path offsets), so every batch is
    integrated at the plan's guard regardless of how far the settings
    stray.  The density is streamed chunk-wise by the kernel backend; no
    large matrices are kept alive between calls.
    """

    def __init__(self, grid: SpectrumGrid, scales: DerivedScales,
                 plan: Optional[IntegrationPlan] = None):
        self.grid = grid
        self.scales = scales
        self.plan = plan or IntegrationPlan()

    def evaluate(self, pairs: Sequence[Tuple[float, float]],
                 tau_exponent: Optional[float] = None) -> np.ndarray:
        """F for each (l1, l2); `tau_exponent` overrides the tau inside the
        phase factor only (the density never depends on tau)."""
        sc = self.scales
        tau = sc.tau if tau_exponent is None else tau_exponent
        a_quad = tau / (sc.mass * _HBAR)
        pairs_arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
        ksum = (pairs_arr[:, 0] + pairs_arr[:, 1]) / (2.0 * _HBAR)
        kdiff = (pairs_arr[:, 0] - pairs_arr[:, 1]) / _HBAR

        rel_lo, rel_hi = self.grid.rel_bounds
        cm_lo, cm_hi = self.grid.cm_bounds
        guard = self.plan.oscillation_guard
        lobe = math.pi * sc.delta_p**2 / (2.0 * sc.p0)

        kd_lo, kd_hi = float(kdiff.min()), float(kdiff.max())
        ks_lo, ks_hi = float(ksum.min()), float(ksum.max())

        def rate_rel(p):
            return np.maximum(np.abs(kd_lo - 2.0 * a_quad * p),
                              np.abs(kd_hi - 2.0 * a_quad * p))

        def rate_cm(p):
            return np.maximum(np.abs(ks_lo - 0.5 * a_quad * p),
                              np.abs(ks_hi - 0.5 * a_quad * p))

        rel_edges = quadrature.panel_edges_by_phase(
            rel_lo, rel_hi, rate_rel, guard,
            min_panels=max(int((rel_hi - rel_lo) / (lobe / 2.0)), 64))
        cm_edges = quadrature.panel_edges_by_phase(
            cm_lo, cm_hi, rate_cm, guard, min_panels=36)
        prel, wrel = quadrature.gl_nodes(rel_edges, self.plan.order)
        pcm, wcm = quadrature.gl_nodes(cm_edges, self.plan.order)

        gcm = self.grid.trap.density(pcm)
        beta = -a_quad * prel**2
        M, R = correlation_moments(pcm, prel, wrel, gcm, beta, kdiff,
                                   sc.p0, sc.delta_p**2, sc.p_bar**2)
        norm = float(wcm @ R)
        alpha = -0.25 * a_quad * pcm**2
        U = np.exp(1j * (alpha[:, None] + np.outer(pcm, ksum))) * wcm[:, None]
        F = (U * M).sum(axis=0) / norm
        if np.any(np.abs(F) > 1.0 + 1e-9):
            raise ArithmeticError("correlation integral left the unit disk; "
                                  "quadrature inconsistent")
        return F


def correlation_integral(grid: SpectrumGrid, scales: DerivedScales,
                         settings: PathSettings,
                         plan: Optional[IntegrationPlan] = None,
                         tau_exponent: Optional[float] = None) -> complex:
    """Single-settings F (see module docstring)."""
    ev = CorrelationEvaluator(grid, scales, plan)
    return complex(ev.evaluate([(settings.ell_1, settings.ell_2)], tau_exponent)[0])


def joint_probability(F: complex, phi_tau: float, sigma_1: int, sigma_2: int) -> float:
    """P(s1, s2) = 1/4 [1 + s1 s2 Re(e^{-i phi_tau} F)]."""
    if sigma_1 not in (-1, 1) or sigma_2 not in (-1, 1):
        raise ValueError("ports are labeled +1 or -1")
    return 0.25 * (1.0 + sigma_1 * sigma_2 * (np.exp(-1j * phi_tau) * F).real)


@dataclass
class FringeScan:
    """Joint probabilities and envelope versus path-length offset."""

    delta_ell: np.ndarray
    probabilities: Dict[Tuple[int, int], np.ndarray]
    envelope: np.ndarray               # |F|
    correlation: np.ndarray            # complex F
    phi_tau: float
    lambda_rel: float
    ell_0: float

    def port(self, sigma_1: int, sigma_2: int) -> np.ndarray:
        return self.probabilities[(sigma_1, sigma_2)]


def fringe_scan(grid: SpectrumGrid, scales: DerivedScales,
                delta_ell_range: Tuple[float, float] = (-300e-6, 300e-6),
                samples: int = 601, phi_tau: float = 0.0,
                plan: Optional[IntegrationPlan] = None,
                tau_exponent: Optional[float] = None) -> FringeScan:
    """Scan delta_l with l1 = ell_0 + delta_l, l2 = -ell_0."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = delta_ell_range
    if not lo < hi:
        raise ValueError("empty scan range")
    delta = np.linspace(lo, hi, samples)
    ev = CorrelationEvaluator(grid, scales, plan)
    ell_0 = scales.ell_0 if tau_exponent is None else tau_exponent * scales.p0 / scales.mass
    F = ev.evaluate([(ell_0 + d, -ell_0) for d in delta], tau_exponent)
    probs = {(s1, s2): 0.25 * (1.0 + s1 * s2 * (np.exp(-1j * phi_tau) * F).real)
             for (s1, s2) in PORT_PAIRS}
    return FringeScan(delta_ell=delta, probabilities=probs, envelope=np.abs(F),
                      correlation=F, phi_tau=phi_tau,
                      lambda_rel=scales.lambda_rel, ell_0=ell_0)


def visibility(scan: FringeScan) -> np.ndarray:
    """Local fringe visibility: |F| relative to the 1/4 baseline."""
    return scan.envelope


def fringe_metrics(scan: FringeScan) -> Dict[str, float]:
    """Summary numbers for a scan.

    fringe_period: from interpolated zero crossings of Re(e^{-i phi} F)
      where the envelope is appreciable;
    envelope_width: Gaussian-equivalent sigma of |F| (quadratic fit of
      log |F| over the half-maximum region) -- the number comparable to the
      initial wave-packet spread;
    width_above_threshold / periods_above_threshold: extent of the region
      usable for a Bell test.
    """
    vis = scan.envelope
    d = scan.delta_ell
    vmax = float(vis.max())
    step = float(d[1] - d[0])

    above = vis > BELL_THRESHOLD
    width_above = float(np.sum(above) * step)

    osc = (np.exp(-1j * scan.phi_tau) * scan.correlation).real
    mask = vis > 0.25 * vmax
    period = math.nan
    idx = np.where(mask[:-1] & mask[1:] & (np.sign(osc[:-1]) != np.sign(osc[1:])))[0]
    if idx.size >= 3:
        x0, x1 = d[idx], d[idx + 1]
        y0, y1 = osc[idx], osc[idx + 1]
        crossings = x0 - y0 * (x1 - x0) / (y1 - y0)
        period = 2.0 * float(np.mean(np.diff(crossings)))

    half = vis >= 0.5 * vmax
    env_sigma = math.nan
    if np.sum(half) >= 5:
        coeff = np.polyfit(d[half], np.log(vis[half]), 2)
        if coeff[0] < 0:
            env_sigma = float(math.sqrt(-0.5 / coeff[0]))

    return {
        "max_visibility": vmax,
        "visibility_at_zero": float(vis[np.argmin(np.abs(d))]),
        "fringe_period": period,
        "envelope_width": env_sigma,
        "width_above_threshold": width_above,
        "periods_above_threshold": (width_above / scan.lambda_rel
                                    if scan.lambda_rel > 0 else math.nan),
    }


@dataclass
class ChshSettings:
    """Interferometer settings of a CHSH run.

    a/a_prime are l1 values (side 1), b/b_prime are l2 values (side 2);
    S = E(a,b) + E(a,b') + E(a',b) - E(a',b') with E = Re(e^{-i phi_tau} F).
    """

    a: float
    a_prime: float
    b: float
    b_prime: float
    S: float = math.nan
    correlations: Optional[Dict[str, float]] = None

    @property
    def pairs(self) -> Tuple[Tuple[float, float], ...]:
        return ((self.a, self.b), (self.a, self.b_prime),
                (self.a_prime, self.b), (self.a_prime, self.b_prime))


def chsh_value(grid: SpectrumGrid, scales: DerivedScales, settings: ChshSettings,
               phi_tau: float = 0.0,
               evaluator: Optional[CorrelationEvaluator] = None) -> ChshSettings:
    """Evaluate S = |E(a,b) + E(a,b') + E(a',b) - E(a',b')| (exact F per pair)."""
    ev = evaluator or CorrelationEvaluator(grid, scales)
    F = ev.evaluate(settings.pairs)
    e = (np.exp(-1j * phi_tau) * F).real
    S = abs(float(e[0] + e[1] + e[2] - e[3]))
    if S > TSIRELSON_BOUND + 1e-9:
        raise ArithmeticError(f"CHSH value {S} exceeds the quantum bound")
    settings.S = S
    settings.correlations = {"E_ab": float(e[0]), "E_ab'": float(e[1]),
                             "E_a'b": float(e[2]), "E_a'b'": float(e[3])}
    return settings


def standard_chsh_settings(grid: SpectrumGrid, scales: DerivedScales,
                           phi_tau: float = 0.0,
                           evaluator: Optional[CorrelationEvaluator] = None,
                           plan: Optional[IntegrationPlan] = None) -> ChshSettings:
    """Four-setting recipe at the optimum overlap, fringe-phase calibrated.

    Side 1 uses {a, a + lambda/4}, side 2 {lambda/8, -lambda/8} (offsets
    around l1 = ell_0, l2 = -ell_0); the base a is placed on the fringe
    maximum of E(a, 0) so the intrinsic fringe phase (dispersion skew plus
    phi_tau) drops out of the correlator phases.
    """
    ev = evaluator or CorrelationEvaluator(grid, scales, plan)
    lam = scales.lambda_rel
    ell_0 = scales.ell_0

    def E_of(offsets: np.ndarray) -> np.ndarray:
        F = ev.evaluate([(ell_0 + x, -ell_0) for x in offsets])
        return (np.exp(-1j * phi_tau) * F).real

    coarse = np.linspace(-lam / 2, lam / 2, 49)
    e = E_of(coarse)
    i = int(np.argmax(e))
    fine = coarse[max(i - 1, 0)] + np.linspace(0, 1, 17) * (
        coarse[min(i + 1, coarse.size - 1)] - coarse[max(i - 1, 0)])
    ef = E_of(fine)
    base = float(fine[np.argmax(ef)])

    return ChshSettings(a=ell_0 + base, a_prime=ell_0 + base + lam / 4,
                        b=-ell_0 + lam / 8, b_prime=-ell_0 - lam / 8)


def chsh_scan(grid: SpectrumGrid, scales: DerivedScales, phi_tau: float = 0.0,
              refine_rounds: int = 3,
              plan: Optional[IntegrationPlan] = None) -> ChshSettings:
    """Best CHSH settings: calibrated recipe plus deterministic refinement.

    Each round evaluates E on the 6x6 cross product of the current
    settings +- h (one kernel pass), rebuilds S for all 3^4 coordinate
    updates from that table, keeps the best, and shrinks h.
    """
    ev = CorrelationEvaluator(grid, scales, plan)
    best = standard_chsh_settings(grid, scales, phi_tau, evaluator=ev)
    best = chsh_value(grid, scales, best, phi_tau, evaluator=ev)
    h = scales.lambda_rel / 32.0

    for _ in range(refine_rounds):
        side1 = np.array([best.a, best.a - h, best.a + h,
                          best.a_prime, best.a_prime - h, best.a_prime + h])
        side2 = np.array([best.b, best.b - h, best.b + h,
                          best.b_prime, best.b_prime - h, best.b_prime + h])
        pairs = [(x, y) for x in side1 for y in side2]
        F = ev.evaluate(pairs).reshape(6, 6)
        E = (np.exp(-1j * phi_tau) * F).real

        s_best, combo_best = best.S, (0, 3, 0, 3)
        for ia in range(3):
            for iap in range(3, 6):
                for ib in range(3):
                    for ibp in range(3, 6):
                        s = abs(E[ia, ib] + E[ia, ibp] + E[iap, ib] - E[iap, ibp])
                        if s > s_best + 1e-15:
                            s_best, combo_best = s, (ia, iap, ib, ibp)
        ia, iap, ib, ibp = combo_best
        best = ChshSettings(a=float(side1[ia]), a_prime=float(side1[iap]),
                            b=float(side2[ib]), b_prime=float(side2[ibp]))
        best = chsh_value(grid, scales, best, phi_tau, evaluator=ev)
        h /= 2.0
    return best
