import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtebell import feshbach
from dtebell.feshbach import (EnergyOffsets, InfeasibleError, PulseSequence,
                              ResonanceParams, SquarePulse, TabulatedField,
                              closed_channel_amplitude, derived_scales,
                              phase_sensitivity,
                              spectrum_analytic_double_square, spectrum_numeric)
from dtebell.units import CONSTANTS

HBAR = CONSTANTS.hbar
KB = CONSTANTS.k_boltzmann
MASS = CONSTANTS.mass_li6_atom

RES = ResonanceParams(width=1e-7, moment_difference=0.01 * CONSTANTS.mu_bohr,
                      position=543.25e-4, background_length=100 * CONSTANTS.bohr_radius)
OFF = EnergyOffsets(trap_depth=KB * 50e-9, guide_frequency=2 * math.pi * 300)
SEQ = PulseSequence.double_square(base_field=543.05e-4, height=4e-5,
                                  duration=60e-3, separation=1.0)
FAST_SEQ = PulseSequence.double_square(base_field=543.05e-4, height=4e-5,
                                       duration=20e-3, separation=0.1)


def sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def rates(seq, res, off):
    wb = (res.moment_difference * (seq.base_field - res.position)
          - 2 * off.trap_depth + HBAR * off.guide_frequency) / HBAR
    wp = wb + res.moment_difference * seq.pulses[0].height / HBAR
    return wb, wp


def single_pulse_reference(seq, res, off, omega):
    """Independent closed form for one square pulse centered at t_c."""
    wb, wp = rates(seq, res, off)
    p = seq.pulses[0]
    T = p.duration
    pref = T * res.moment_difference * p.height * sinc((omega - wp) * T / 2) \
        / (HBAR * (omega - wb))
    return pref * np.exp(1j * omega * p.center)


# ---------------------------------------------------------------- C(t)

@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-4, max_value=0.5), st.floats(min_value=0.0, max_value=1e-4),
       st.floats(min_value=0.6, max_value=3.0), st.floats(min_value=-2.0, max_value=5.0))
def test_amplitude_is_pure_phase(duration, height, separation, t):
    seq = PulseSequence.double_square(543.05e-4, height, duration, separation)
    c = closed_channel_amplitude(seq, RES, OFF, t)
    assert abs(abs(complex(c)) - 1.0) < 1e-12


def test_amplitude_identity_before_sequence():
    t = np.array([SEQ.start - 1e-3, SEQ.start - 5.0])
    assert np.allclose(closed_channel_amplitude(SEQ, RES, OFF, t), 1.0)


def test_amplitude_constant_field_on_resonance():
    # zero integrand: field pinned at the resonance with no offsets
    seq = PulseSequence.single_square(RES.position, 0.0, 0.05)
    off0 = EnergyOffsets(0.0, 0.0)
    t = np.linspace(-1, 1, 7)
    assert np.allclose(closed_channel_amplitude(seq, RES, off0, t), 1.0)


def test_amplitude_phase_against_numeric_integration():
    # oracle: adaptive integration of the rate, pulse edges passed as
    # known discontinuities
    from scipy.integrate import quad
    t_end = SEQ.end + 0.3

    def rate(t):
        b = float(SEQ.field_at(np.array([t]))[0])
        return (RES.moment_difference * (b - RES.position) - 2 * OFF.trap_depth
                + HBAR * OFF.guide_frequency) / HBAR

    edges = [p.start for p in SEQ.pulses] + [p.end for p in SEQ.pulses]
    phase = quad(rate, SEQ.start, t_end, points=sorted(edges), limit=400,
                 epsabs=1e-10, epsrel=1e-12)[0]
    expected = np.exp(-1j * phase)
    got = complex(closed_channel_amplitude(SEQ, RES, OFF, t_end))
    assert got == pytest.approx(expected, abs=1e-6)


def test_amplitude_phase_closed_form_after_both_pulses():
    # independent piecewise-analytic integration
    t = SEQ.end + 0.2
    wb, _ = rates(SEQ, RES, OFF)
    phase = wb * (t - SEQ.start) + RES.moment_difference * SEQ.pulses[0].height \
        * (2 * SEQ.pulses[0].duration) / HBAR
    got = complex(closed_channel_amplitude(SEQ, RES, OFF, t))
    assert got == pytest.approx(np.exp(-1j * phase), abs=1e-9)


# ------------------------------------------------- analytic double pulse

def test_analytic_peak_at_sinc_center():
    wb, wp = rates(SEQ, RES, OFF)
    # at the sinc center the modulus is governed by sinc(0) = 1
    lobe = 2 * math.pi / SEQ.pulses[0].duration
    omega = np.array([wp - lobe / 3, wp, wp + lobe / 3])
    mag = np.abs(spectrum_analytic_double_square(SEQ, RES, OFF, omega))
    # strip the interference factor to isolate the sinc envelope
    tau = SEQ.separation_tau
    phi2 = ((2 * OFF.trap_depth * tau
             - RES.moment_difference * SEQ.pulses[0].height * SEQ.pulses[0].duration
             + RES.moment_difference * (RES.position - SEQ.base_field) * tau) / HBAR
            - OFF.guide_frequency * tau)
    bracket = np.abs(np.exp(-1j * omega * tau) + np.exp(1j * phi2))
    envelope = mag / bracket
    assert envelope[1] > envelope[0] and envelope[1] > envelope[2]


def test_analytic_zero_height_vanishes():
    seq = PulseSequence(543.05e-4, (
        SquarePulse(-1.03, 0.06, 0.0), SquarePulse(-0.03, 0.06, 0.0)))
    omega = np.linspace(0, 8000, 50)
    assert np.allclose(spectrum_analytic_double_square(seq, RES, OFF, omega), 0.0)


def test_analytic_interference_period():
    # |C~|^2 oscillates in omega with period 2 pi / tau
    wb, wp = rates(SEQ, RES, OFF)
    tau = SEQ.separation_tau
    omega = wp + np.linspace(0, 4 * math.pi / tau, 4001)
    mag2 = np.abs(spectrum_analytic_double_square(SEQ, RES, OFF, omega)) ** 2
    single2 = np.abs(single_pulse_reference(
        PulseSequence.single_square(SEQ.base_field, SEQ.pulses[0].height,
                                    SEQ.pulses[0].duration), RES, OFF, omega)) ** 2
    ratio = mag2 / single2
    # 2(1 + cos) envelope: extremes 0 and 4, period 2 pi / tau
    assert ratio.max() == pytest.approx(4.0, abs=1e-3)
    assert ratio.min() == pytest.approx(0.0, abs=1e-3)
    peaks = omega[1:-1][(ratio[1:-1] > ratio[:-2]) & (ratio[1:-1] > ratio[2:])]
    assert np.diff(peaks).mean() == pytest.approx(2 * math.pi / tau, rel=1e-3)


def test_analytic_envelope_identity():
    # |C~_double|^2 = |C~_single|^2 * 2 (1 + cos(omega tau + phi2))
    _, wp = rates(SEQ, RES, OFF)
    tau = SEQ.separation_tau
    p = SEQ.pulses[0]
    omega = wp + np.linspace(-math.pi / p.duration, math.pi / p.duration, 301)
    double2 = np.abs(spectrum_analytic_double_square(SEQ, RES, OFF, omega)) ** 2
    single = PulseSequence.single_square(SEQ.base_field, p.height, p.duration)
    single2 = np.abs(single_pulse_reference(single, RES, OFF, omega)) ** 2
    phi2 = ((2 * OFF.trap_depth * tau - RES.moment_difference * p.height * p.duration
             + RES.moment_difference * (RES.position - SEQ.base_field) * tau) / HBAR
            - OFF.guide_frequency * tau)
    expected = single2 * 2.0 * (1.0 + np.cos(omega * tau + phi2))
    assert np.allclose(double2, expected, rtol=1e-10, atol=1e-10 * double2.max())


def test_analytic_rejects_non_canonical():
    seq = PulseSequence(543.05e-4, (
        SquarePulse(-1.0, 0.06, 4e-5), SquarePulse(0.0, 0.03, 4e-5)))
    with pytest.raises(ValueError, match="canonical"):
        spectrum_analytic_double_square(seq, RES, OFF, np.array([100.0]))


# ------------------------------------------------------ numeric transform

def test_numeric_matches_analytic_fast():
    _, wp = rates(FAST_SEQ, RES, OFF)
    T = FAST_SEQ.pulses[0].duration
    omega = np.linspace(wp - 2 * math.pi / T, wp + 2 * math.pi / T, 120)
    analytic = spectrum_analytic_double_square(FAST_SEQ, RES, OFF, omega)
    numeric = spectrum_numeric(FAST_SEQ, RES, OFF, omega)
    err = np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)
    assert err < 1e-6


def test_numeric_single_pulse_matches_reference():
    seq = PulseSequence.single_square(543.05e-4, 4e-5, 20e-3)
    _, wp = rates(seq, RES, OFF)
    T = seq.pulses[0].duration
    omega = np.linspace(wp - 2 * math.pi / T, wp + 2 * math.pi / T, 80)
    numeric = spectrum_numeric(seq, RES, OFF, omega)
    reference = single_pulse_reference(seq, RES, OFF, omega)
    err = np.linalg.norm(numeric - reference) / np.linalg.norm(reference)
    assert err < 1e-6


def test_numeric_zero_height_vanishes():
    seq = PulseSequence(543.05e-4, (
        SquarePulse(-0.13, 0.02, 0.0), SquarePulse(-0.02, 0.02, 0.0)))
    _, wp = rates(seq, RES, OFF)
    omega = np.linspace(wp - 100, wp + 100, 30)
    numeric = spectrum_numeric(seq, RES, OFF, omega)
    # scale: a real pulse of the same duration
    scale = np.abs(single_pulse_reference(
        PulseSequence.single_square(543.05e-4, 4e-5, 0.02), RES, OFF, omega)).max()
    assert np.abs(numeric).max() < 1e-9 * scale


def test_numeric_three_pulse_against_boundary_algebra():
    # independent oracle for a non-canonical sequence: each pulse contributes
    # a sinc factor with its own peak rate, an e^{i omega t_center} shift and
    # the closed-channel phase accumulated up to its start (boundary terms of
    # the piecewise-constant-rate integral); the first pulse is phase-aligned.
    seq = PulseSequence(543.05e-4, (
        SquarePulse(-0.40, 0.030, 4e-5),
        SquarePulse(-0.20, 0.015, 2e-5),
        SquarePulse(0.00, 0.045, 5e-5),
    ))
    wb = (RES.moment_difference * (seq.base_field - RES.position)
          - 2 * OFF.trap_depth + HBAR * OFF.guide_frequency) / HBAR
    mu = RES.moment_difference

    def phase_at(t):
        p = wb * (t - seq.start)
        for pl in seq.pulses:
            p += mu * pl.height / HBAR * max(min(t, pl.end) - pl.start, 0.0)
        return p

    omega = np.linspace(1000, 9000, 90)
    thetas = []
    terms = []
    for pl in seq.pulses:
        wp = wb + mu * pl.height / HBAR
        thetas.append(-wp * pl.duration / 2 - phase_at(pl.start))
        pref = pl.duration * mu * pl.height * sinc((omega - wp) * pl.duration / 2) \
            / (HBAR * (omega - wb))
        terms.append(pref * np.exp(1j * omega * pl.center))
    reference = sum(t * np.exp(1j * (th - thetas[0]))
                    for t, th in zip(terms, thetas))

    numeric = spectrum_numeric(seq, RES, OFF, omega)
    assert np.linalg.norm(numeric - reference) / np.linalg.norm(reference) < 1e-9


def test_numeric_tabulated_self_convergence():
    # smooth ramp pulse: refining the table must converge at second order
    # (the residual is the table's own piecewise-linear representation)
    base = 543.05e-4

    def bfield(t):
        return base + 4e-5 * np.sin(math.pi * (t + 0.05) / 0.1) ** 2

    omega = np.linspace(0, 6000, 60)
    results = {}
    for n in (401, 801, 1601):
        t = np.linspace(-0.05, 0.05, n)
        results[n] = spectrum_numeric(TabulatedField(t, bfield(t), base),
                                      RES, OFF, omega)
    err_lo = np.linalg.norm(results[801] - results[401])
    err_hi = np.linalg.norm(results[1601] - results[801])
    assert err_lo / np.linalg.norm(results[1601]) < 5e-3
    assert 3.0 < err_lo / err_hi < 5.5


def test_tabulated_rejects_coarse_sampling():
    t = np.linspace(-0.05, 0.05, 12)   # step > support/20
    with pytest.raises(ValueError, match="coarse"):
        TabulatedField(t, np.full(t.size, 543.05e-4), 543.05e-4)


# ------------------------------------------------------- derived scales

def test_scales_baseline_velocity():
    sc = derived_scales(SEQ, RES, OFF, MASS)
    assert sc.velocity == pytest.approx(5e-3, rel=0.10)          # design anchor
    assert sc.velocity == pytest.approx(5.250639884e-3, rel=1e-9)  # regression


def test_scales_width_ratios():
    sc = derived_scales(SEQ, RES, OFF, MASS)
    assert (sc.delta_p / sc.p0) ** 2 == pytest.approx(0.012, rel=0.20)
    assert sc.delta_p / sc.p0 == pytest.approx(0.11, rel=0.20)


def test_scales_overlap_length():
    sc = derived_scales(SEQ, RES, OFF, MASS)
    assert sc.ell_0 == pytest.approx(5e-3, rel=0.10)
    assert sc.lambda_rel == pytest.approx(CONSTANTS.planck / sc.p0, rel=1e-14)


def test_scales_pole_safety():
    sc = derived_scales(SEQ, RES, OFF, MASS)
    assert sc.p_bar > sc.p0


def test_scales_infeasible_when_trap_too_deep():
    deep = EnergyOffsets(trap_depth=KB * 2e-6, guide_frequency=OFF.guide_frequency)
    with pytest.raises(InfeasibleError):
        derived_scales(SEQ, RES, deep, MASS)


def test_sequence_validation():
    with pytest.raises(ValueError, match="non-overlapping"):
        PulseSequence(543.05e-4, (SquarePulse(0.0, 0.1, 1e-5),
                                  SquarePulse(0.05, 0.1, 1e-5)))
    with pytest.raises(ValueError, match="below the resonance"):
        SEQ_bad = PulseSequence.double_square(544e-4, 4e-5, 0.06, 1.0)
        spectrum_analytic_double_square(SEQ_bad, RES, OFF, np.array([1.0]))


# ---------------------------------------------------- phase sensitivity

def test_phase_sensitivity_band():
    dphi = phase_sensitivity(SEQ, RES, OFF, 1e-5)
    assert 0.1 <= dphi <= 0.2


def test_phase_sensitivity_linear():
    d1 = phase_sensitivity(SEQ, RES, OFF, 1e-5)
    d2 = phase_sensitivity(SEQ, RES, OFF, 2e-5)
    assert d2 == pytest.approx(2 * d1, rel=1e-12)
    assert phase_sensitivity(SEQ, RES, OFF, 0.0) == 0.0
