"""Magnetic pulse sequences and the closed-channel amplitude they drive.

A narrow, isolated resonance pulsed from below converts a trapped molecule
into a correlated atom pair.  In the weak-coupling regime the closed-channel
probability amplitude is the pure phase

    C(t) = exp(-(i/hbar) Int_{t0}^{t} [mu (B(t') - B_pos) - 2 U_T + hbar w_G] dt'),

with C = 1 before the sequence starts.  Its Fourier transform C~(omega)
is the dissociation amplitude into total frequency omega, evaluated here
either in closed form (double square pulse) or by phase-aware quadrature
plus the closed-form adiabatic tail terms (any pulse shape that returns to
the base field).

For the canonical double square pulse (heights dB, durations T, centers
separated by tau; first pulse at -tau, second at 0):

    C~(omega) = T mu dB sinc[(omega - w_p) T/2] / (hbar (omega - w_b))
                * { e^{-i omega tau} + e^{i Phi2} },

where w_b / w_p are the phase rates at base / pulse field, sinc(x) =
sin(x)/x, and a constant global phase has been fixed so that the early
pulse's term carries no extra phase.  Phi2 differs from the early/late
relative phase phi_tau only by the transverse zero-point term:
Phi2 = phi_tau - 2 w_G tau.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import quadrature
from .quadrature import IntegrationPlan
from .units import CONSTANTS

__all__ = [
    "ResonanceParams", "SquarePulse", "PulseSequence", "TabulatedField",
    "EnergyOffsets", "DerivedScales", "InfeasibleError",
    "closed_channel_amplitude", "spectrum_analytic_double_square",
    "spectrum_numeric", "derived_scales", "phase_sensitivity",
]

_HBAR = CONSTANTS.hbar
_H = CONSTANTS.planck


class InfeasibleError(ValueError):
    """The pulse cannot overcome the trap depth and transverse offset."""


@dataclass(frozen=True)
class ResonanceParams:
    """Feshbach resonance constants (SI).

    `moment_difference` is the difference between the magnetic moments of
    the resonance state and the open channel; `width` the resonance width;
    `position` the resonance field; `background_length` the open-channel
    scattering length.
    """

    width: float              # T
    moment_difference: float  # J/T
    position: float           # T
    background_length: float  # m

    def __post_init__(self):
        for name in ("width", "moment_difference", "position", "background_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"resonance {name} must be > 0")


@dataclass(frozen=True)
class SquarePulse:
    start: float     # s
    duration: float  # s
    height: float    # T (field increment above the base value)

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("pulse duration must be > 0")
        if self.height < 0:
            raise ValueError("pulse height must be >= 0")

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def center(self) -> float:
        return self.start + 0.5 * self.duration


@dataclass(frozen=True)
class PulseSequence:
    """Base field plus time-ordered, non-overlapping square pulses."""

    base_field: float                       # T
    pulses: Tuple[SquarePulse, ...]

    def __post_init__(self):
        if not self.pulses:
            raise ValueError("at least one pulse required")
        for a, b in zip(self.pulses, self.pulses[1:]):
            if b.start < a.end:
                raise ValueError("pulses must be time-ordered and non-overlapping")

    @classmethod
    def double_square(cls, base_field: float, height: float, duration: float,
                      separation: float) -> "PulseSequence":
        """Canonical layout: equal pulses centered at -separation and 0."""
        if separation <= duration:
            raise ValueError("pulse separation must exceed the pulse duration")
        return cls(base_field, (
            SquarePulse(-separation - duration / 2, duration, height),
            SquarePulse(-duration / 2, duration, height),
        ))

    @classmethod
    def single_square(cls, base_field: float, height: float, duration: float) -> "PulseSequence":
        return cls(base_field, (SquarePulse(-duration / 2, duration, height),))

    @property
    def start(self) -> float:
        return self.pulses[0].start

    @property
    def end(self) -> float:
        return self.pulses[-1].end

    @property
    def is_canonical_double(self) -> bool:
        if len(self.pulses) != 2:
            return False
        p1, p2 = self.pulses
        return p1.height == p2.height and p1.duration == p2.duration

    @property
    def separation_tau(self) -> float:
        """Center-to-center separation of the canonical double sequence."""
        if len(self.pulses) != 2:
            raise ValueError("separation_tau is defined for two-pulse sequences")
        return self.pulses[1].center - self.pulses[0].center

    def field_at(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        b = np.full(t.shape, self.base_field)
        for p in self.pulses:
            b = b + p.height * ((t >= p.start) & (t <= p.end))
        return b

    def validate_against(self, res: ResonanceParams) -> None:
        """Base field must sit below the resonance position."""
        if self.base_field >= res.position:
            raise ValueError("base field must stay below the resonance position")


@dataclass(frozen=True)
class TabulatedField:
    """Sampled B(t) for arbitrary pulse shapes, linearly interpolated.

    The field must equal `base_field` at both ends (the adiabatic tail
    terms of the Fourier transform assume a constant field outside the
    window).  Sampling coarser than 1/20 of the support is rejected.
    """

    times: np.ndarray
    values: np.ndarray
    base_field: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 3:
            raise ValueError("times/values must be matching 1-D arrays (>= 3 samples)")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        support = t[-1] - t[0]
        if np.max(np.diff(t)) > support / 20.0:
            raise ValueError("field table too coarse: need step <= support/20")
        if not (np.isclose(v[0], self.base_field) and np.isclose(v[-1], self.base_field)):
            raise ValueError("field table must start and end at the base field")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class EnergyOffsets:
    """Energy offsets the dissociation must overcome: longitudinal trap
    depth (enters twice, once per atom) and transverse guide zero point."""

    trap_depth: float       # J
    guide_frequency: float  # rad/s

    def __post_init__(self):
        if self.trap_depth < 0 or self.guide_frequency < 0:
            raise ValueError("offsets must be >= 0")


@dataclass(frozen=True)
class DerivedScales:
    """Momentum/length/phase scales of the dissociated pair.

    p0: peak relative momentum, p0^2/m = mu (B0 + dB - B_pos) - 2 U_T - hbar w_G
    delta_p: sinc width scale, delta_p^2 = 2 m hbar / T
    p_bar: pulse energy scale, p_bar^2/m = mu dB
    phi_tau: relative phase between early and late components
    ell_0: optimum-overlap path difference tau p0 / m
    lambda_rel: de Broglie wavelength h / p0 (fringe period)
    """

    p0: float
    delta_p: float
    p_bar: float
    phi_tau: float
    ell_0: float
    lambda_rel: float
    tau: float
    pulse_duration: float
    mass: float
    sigma_p_trap: Optional[float] = None

    @property
    def velocity(self) -> float:
        """Single-atom propagation speed p0/m."""
        return self.p0 / self.mass

    def with_trap_spread(self, sigma_p: float) -> "DerivedScales":
        return replace(self, sigma_p_trap=sigma_p)


def _base_rate(seq_base: float, res: ResonanceParams, off: EnergyOffsets) -> float:
    """Phase rate (rad/s) of C(t) at constant field B: the Eq-of-motion
    integrand divided by hbar."""
    return (res.moment_difference * (seq_base - res.position)
            - 2.0 * off.trap_depth + _HBAR * off.guide_frequency) / _HBAR


def _phase_at(seq: PulseSequence, res: ResonanceParams, off: EnergyOffsets,
              t: np.ndarray) -> np.ndarray:
    """Accumulated phase of C(t) = exp(-i phase), zero before the sequence."""
    t = np.asarray(t, dtype=float)
    wb = _base_rate(seq.base_field, res, off)
    phase = wb * np.clip(t - seq.start, 0.0, None)
    for p in seq.pulses:
        on = np.clip(t, p.start, p.end) - p.start
        phase = phase + (res.moment_difference * p.height / _HBAR) * on
    return phase


def closed_channel_amplitude(seq: PulseSequence, res: ResonanceParams,
                             off: EnergyOffsets,
                             t: Union[float, np.ndarray]) -> np.ndarray:
    """C(t) for the given sequence; |C| = 1 always, C = 1 before the start.

    Pure phase accumulation; the base-below-resonance invariant is enforced
    where dissociation physics is derived, not here.
    """
    return np.exp(-1j * _phase_at(seq, res, off, t))


def _rates(seq: PulseSequence, res: ResonanceParams, off: EnergyOffsets):
    wb = _base_rate(seq.base_field, res, off)
    wp = [wb + res.moment_difference * p.height / _HBAR for p in seq.pulses]
    return wb, wp


def spectrum_analytic_double_square(seq: PulseSequence, res: ResonanceParams,
                                    off: EnergyOffsets,
                                    omega: Union[float, np.ndarray]) -> np.ndarray:
    """Closed-form C~(omega) for the canonical double square sequence.

    Global phase fixed so the early pulse's interference term is exactly
    e^{-i omega tau}; the second term then carries
    e^{i [2 U_T tau - mu dB T + mu (B_pos - B0) tau]/hbar - i w_G tau}.
    """
    if not seq.is_canonical_double:
        raise ValueError("analytic form requires the canonical double square "
                         "sequence; use spectrum_numeric for other shapes")
    seq.validate_against(res)
    omega = np.asarray(omega, dtype=float)
    p1 = seq.pulses[0]
    T = p1.duration
    tau = seq.separation_tau
    dB = p1.height
    mu = res.moment_difference
    wb, (wp, _) = _rates(seq, res, off)

    x = (omega - wp) * T / 2.0
    prefactor = T * mu * dB * np.sinc(x / np.pi) / (_HBAR * (omega - wb))
    phi2 = ((2.0 * off.trap_depth * tau - mu * dB * T
             + mu * (res.position - seq.base_field) * tau) / _HBAR
            - off.guide_frequency * tau)
    return prefactor * (np.exp(-1j * omega * tau) + np.exp(1j * phi2))


def _first_pulse_phase_convention(seq: PulseSequence, wp1: float) -> float:
    """Constant phase theta such that multiplying the raw transform by
    e^{-i theta} makes the first pulse's contribution carry no extra phase
    (the convention of the closed form)."""
    return -wp1 * seq.pulses[0].duration / 2.0


def spectrum_numeric(field: Union[PulseSequence, TabulatedField],
                     res: ResonanceParams, off: EnergyOffsets,
                     omega: np.ndarray,
                     plan: Optional[IntegrationPlan] = None) -> np.ndarray:
    """C~(omega) by quadrature over the sequence window plus adiabatic tails.

    The window integral Int_{start}^{end} e^{i omega t} C(t) dt is done with
    phase-aware composite Gauss-Legendre panels; the constant-field tails
    outside the window are added in closed form (phase convention
    phase(t_start) = 0, i.e. C = 1 at the sequence start),

        +e^{i omega t_start} / (i (omega - w_b))
        -e^{i(omega t_end - phase(t_end))} / (i (omega - w_b)).

    For square-pulse sequences the same global-phase convention as the
    closed form is applied, so both paths agree pointwise.
    """
    plan = plan or IntegrationPlan()
    omega = np.atleast_1d(np.asarray(omega, dtype=float))

    if isinstance(field, PulseSequence):
        field.validate_against(res)
        seq = field
        wb, wps = _rates(seq, res, off)
        # panelize each constant-rate segment by its own phase rate
        bounds = [seq.start]
        rates = []
        for i, p in enumerate(seq.pulses):
            if p.start > bounds[-1]:
                rates.append(wb)
                bounds.append(p.start)
            rates.append(wps[i])
            bounds.append(p.end)
        nodes_list, weights_list = [], []
        for (a, b), r in zip(zip(bounds[:-1], bounds[1:]), rates):
            max_rate = float(np.max(np.abs(omega - r)))
            n = quadrature.phase_resolved_panels(max_rate, a, b,
                                                 plan.oscillation_guard, min_panels=2)
            pn, pw = quadrature.gl_nodes(np.linspace(a, b, n + 1), plan.order)
            nodes_list.append(pn)
            weights_list.append(pw)
        t_nodes = np.concatenate(nodes_list)
        t_weights = np.concatenate(weights_list)
        phase_nodes = _phase_at(seq, res, off, t_nodes)
        phase_end = float(_phase_at(seq, res, off, np.array(seq.end)))
        t_start, t_end = seq.start, seq.end
        theta = _first_pulse_phase_convention(seq, wps[0])
    else:
        tab = field
        wb = _base_rate(tab.base_field, res, off)
        rate_t = (res.moment_difference * (tab.values - res.position)
                  - 2.0 * off.trap_depth + _HBAR * off.guide_frequency) / _HBAR
        # B(t) is piecewise linear, so the phase is piecewise quadratic and
        # can be accumulated exactly at the table nodes ...
        seg_phase = 0.5 * (rate_t[1:] + rate_t[:-1]) * np.diff(tab.times)
        node_phase = np.concatenate([[0.0], np.cumsum(seg_phase)])
        max_rate = float(np.max(np.abs(omega[:, None] - rate_t[None, :])))
        n = quadrature.phase_resolved_panels(max_rate, tab.start, tab.end,
                                             plan.oscillation_guard,
                                             min_panels=tab.times.size)
        t_nodes, t_weights = quadrature.gl_nodes(
            np.linspace(tab.start, tab.end, n + 1), plan.order)
        # ... and evaluated exactly (quadratic) at the quadrature nodes
        k = np.clip(np.searchsorted(tab.times, t_nodes, side="right") - 1,
                    0, tab.times.size - 2)
        dt_seg = tab.times[k + 1] - tab.times[k]
        slope = (rate_t[k + 1] - rate_t[k]) / dt_seg
        u = t_nodes - tab.times[k]
        phase_nodes = node_phase[k] + rate_t[k] * u + 0.5 * slope * u * u
        phase_end = float(node_phase[-1])
        t_start, t_end = tab.start, tab.end
        theta = 0.0  # raw-transform convention for tabulated shapes

    from ._kernels import fourier_sums
    window = fourier_sums(t_nodes, t_weights, phase_nodes, omega)
    denom = 1j * (omega - wb)
    tail_in = np.exp(1j * omega * t_start) / denom
    tail_out = -np.exp(1j * (omega * t_end - phase_end)) / denom
    return (window + tail_in + tail_out) * np.exp(-1j * theta)


def derived_scales(seq: PulseSequence, res: ResonanceParams, off: EnergyOffsets,
                   mass: float) -> DerivedScales:
    """Momentum and phase scales for the canonical double sequence."""
    if not seq.is_canonical_double:
        raise ValueError("derived scales are defined for the canonical double "
                         "square sequence")
    seq.validate_against(res)
    p1 = seq.pulses[0]
    T = p1.duration
    tau = seq.separation_tau
    mu = res.moment_difference
    dB = p1.height

    p0_sq_over_m = (mu * (seq.base_field + dB - res.position)
                    - 2.0 * off.trap_depth - _HBAR * off.guide_frequency)
    if p0_sq_over_m <= 0:
        raise InfeasibleError(
            "pulse cannot overcome trap depth and transverse zero-point offset: "
            f"mu*(B0+dB-B_pos) - 2U_T - hbar*w_G = {p0_sq_over_m:.3e} J <= 0")
    p0 = math.sqrt(mass * p0_sq_over_m)
    delta_p = math.sqrt(2.0 * mass * _HBAR / T)
    p_bar = math.sqrt(mass * mu * dB)
    phi_tau = ((2.0 * off.trap_depth * tau - mu * dB * T
                + mu * (res.position - seq.base_field) * tau) / _HBAR
               + off.guide_frequency * tau)
    return DerivedScales(
        p0=p0, delta_p=delta_p, p_bar=p_bar, phi_tau=phi_tau,
        ell_0=tau * p0 / mass, lambda_rel=_H / p0, tau=tau,
        pulse_duration=T, mass=mass,
    )


def phase_sensitivity(seq: PulseSequence, res: ResonanceParams, off: EnergyOffsets,
                      relative_field_error: float) -> float:
    """Worst-case |d phi_tau| when the field increments (B_pos - B0) and dB
    each carry the given relative error.  First order, hence linear."""
    if not seq.is_canonical_double:
        raise ValueError("phase sensitivity is defined for the canonical double "
                         "square sequence")
    p1 = seq.pulses[0]
    mu = res.moment_difference
    tau = seq.separation_tau
    contributions = (mu * p1.height * p1.duration
                     + mu * (res.position - seq.base_field) * tau)
    return abs(relative_field_error) * contributions / _HBAR
