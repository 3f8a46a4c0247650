import dataclasses
import math

import numpy as np
import pytest

from dtebell.spectrum import (GaussianFit, TrapGroundState, WindowError,
                              build_grid, dissociation_probability,
                              gaussian_fit, norm_closed_form, norm_cross_check,
                              single_pulse_amplitude)
from dtebell.units import CONSTANTS

HBAR = CONSTANTS.hbar
MASS = CONSTANTS.mass_li6_atom


def test_trap_ground_state_momentum_spread():
    trap = TrapGroundState(omega=2 * math.pi * 0.25, mass=MASS)
    assert trap.sigma_p == math.sqrt(HBAR * 2 * math.pi * 0.25 * MASS)


def test_trap_ground_state_normalized():
    trap = TrapGroundState(omega=2 * math.pi * 0.25, mass=MASS)
    p = np.linspace(-8 * trap.sigma_p, 8 * trap.sigma_p, 20001)
    amp = trap.amplitude(p)
    assert np.all(amp > 0)
    assert np.trapezoid(amp**2, p) == pytest.approx(1.0, rel=1e-9)


def test_amplitude_peaks_at_p0(baseline_scales, baseline_trap):
    sc = baseline_scales
    p_rel = sc.p0 + np.linspace(-2, 2, 5) * sc.delta_p**2 / (2 * sc.p0)
    amp = np.abs(single_pulse_amplitude(sc, baseline_trap, 0.0, p_rel))
    assert np.argmax(amp) == 2


def test_amplitude_mirror_symmetry(baseline_scales, baseline_trap):
    sc = baseline_scales
    pc = 0.7 * baseline_trap.sigma_p
    pr = 0.98 * sc.p0
    ref = abs(single_pulse_amplitude(sc, baseline_trap, pc, pr))
    assert abs(single_pulse_amplitude(sc, baseline_trap, -pc, pr)) == pytest.approx(ref, rel=1e-14)
    assert abs(single_pulse_amplitude(sc, baseline_trap, pc, -pr)) == pytest.approx(ref, rel=1e-14)
    assert abs(single_pulse_amplitude(sc, baseline_trap, -pc, -pr)) == pytest.approx(ref, rel=1e-14)


def test_norm_quadrature_agrees_with_closed_form(baseline_scales, baseline_trap):
    result = norm_cross_check(baseline_scales, baseline_trap)
    assert abs(result.relative_difference) < 0.05


def test_norm_closed_form_scaling(baseline_scales):
    sc = baseline_scales
    # doubling T: delta_p^2 halves, T^2 quadruples -> norm doubles
    sc2 = dataclasses.replace(sc, pulse_duration=2 * sc.pulse_duration,
                              delta_p=sc.delta_p / math.sqrt(2))
    assert norm_closed_form(sc2) == pytest.approx(2 * norm_closed_form(sc), rel=1e-12)
    # doubling p0 halves the norm
    sc3 = dataclasses.replace(sc, p0=2 * sc.p0)
    assert norm_closed_form(sc3) == pytest.approx(norm_closed_form(sc) / 2, rel=1e-12)


def test_dissociation_probability_baseline(baseline, baseline_scales):
    prob = dissociation_probability(baseline_scales, baseline.resonance,
                                    baseline.offsets.guide_frequency)
    assert prob == pytest.approx(0.04, rel=0.15)
    assert prob == pytest.approx(0.0400952, rel=1e-5)  # regression


def test_dissociation_probability_linearities(baseline, baseline_scales):
    res = baseline.resonance
    w_g = baseline.offsets.guide_frequency
    base = dissociation_probability(baseline_scales, res, w_g)
    res2 = dataclasses.replace(res, background_length=2 * res.background_length)
    assert dissociation_probability(baseline_scales, res2, w_g) == pytest.approx(
        2 * base, rel=1e-12)
    res3 = dataclasses.replace(res, width=2 * res.width)
    assert dissociation_probability(baseline_scales, res3, w_g) == pytest.approx(
        2 * base, rel=1e-12)
    res0 = dataclasses.replace(res, background_length=1e-30)
    assert dissociation_probability(baseline_scales, res0, w_g) == pytest.approx(
        0.0, abs=1e-12)


def test_dissociation_probability_warns_outside_weak_coupling(baseline, baseline_scales):
    res = dataclasses.replace(baseline.resonance, width=30 * baseline.resonance.width)
    with pytest.warns(UserWarning, match="weak-coupling"):
        dissociation_probability(baseline_scales, res, baseline.offsets.guide_frequency)


def test_grid_normalized_and_peaked(fast_grid, fast_scales):
    grid = fast_grid
    total = grid.density.sum() * grid.cell_area
    assert total == pytest.approx(1.0, abs=1e-9)
    i, j = grid.peak_indices
    assert grid.p_cm_axis[i] == 0.0
    assert grid.p_rel_axis[j] == pytest.approx(fast_scales.p0, rel=1e-12)


def test_grid_axes_contain_anchors(fast_grid, fast_scales):
    assert 0.0 in fast_grid.p_cm_axis
    assert np.isclose(fast_grid.p_rel_axis, fast_scales.p0).any()
    assert fast_grid.p_rel_axis[0] >= 0.0


def test_grid_renormalization_idempotent(fast_grid):
    # scaling then renormalizing reproduces the stored amplitudes
    amp = fast_grid.amplitude * 0.5
    norm = (amp**2).sum() * fast_grid.cell_area
    assert np.allclose(amp / math.sqrt(norm), fast_grid.amplitude)


def test_grid_deficit_reported_small(fast_grid):
    assert 0.0 <= fast_grid.deficit < 1e-3


def test_window_error_on_narrow_window(baseline_scales, baseline_trap):
    with pytest.raises(WindowError) as err:
        build_grid(baseline_scales, baseline_trap, window_sigmas=(6.0, 2.0),
                   points=(33, 129))
    assert err.value.deficit > 1e-3


def test_window_must_cover_eight_lobes(baseline_scales, baseline_trap):
    with pytest.raises(ValueError, match="8 sinc side lobes"):
        build_grid(baseline_scales, baseline_trap, window_sigmas=(6.0, 1.0),
                   points=(33, 129))


def test_gaussian_fit_recovers_exact_gaussian(fast_grid):
    grid = dataclasses.replace(fast_grid)
    target = GaussianFit(center_cm=0.0, center_rel=fast_grid.scales.p0,
                         sigma_cm=2.0e-30, sigma_rel=3.0e-30, amplitude=1.0e59)
    PC, PR = np.meshgrid(grid.p_cm_axis, grid.p_rel_axis, indexing="ij")
    grid.amplitude = np.sqrt(target.evaluate(PC, PR))
    fits = gaussian_fit(grid)
    fit = fits["least_squares"]
    assert fit.center_cm == pytest.approx(0.0, abs=1e-6 * target.sigma_cm)
    assert fit.center_rel == pytest.approx(target.center_rel, rel=1e-9)
    assert fit.sigma_cm == pytest.approx(target.sigma_cm, rel=1e-6)
    assert fit.sigma_rel == pytest.approx(target.sigma_rel, rel=1e-6)


def test_gaussian_fit_envelope_wider_than_least_squares(fast_grid):
    fits = gaussian_fit(fast_grid)
    assert fits["upper_envelope"].sigma_rel > fits["least_squares"].sigma_rel


def test_gaussian_fit_center_within_one_cell(fast_grid, fast_scales):
    fits = gaussian_fit(fast_grid)
    cell_cm = fast_grid.p_cm_axis[1] - fast_grid.p_cm_axis[0]
    cell_rel = fast_grid.p_rel_axis[1] - fast_grid.p_rel_axis[0]
    for fit in fits.values():
        assert abs(fit.center_cm) < cell_cm
        assert abs(fit.center_rel - fast_scales.p0) < cell_rel
