import dataclasses

import pytest

from dtebell import scenario
from dtebell.feshbach import PulseSequence
from dtebell.scenario import ConfigError, audit, derived_report, load_config


def test_baseline_loads(baseline):
    assert baseline.species == "Li-6"
    assert baseline.guide_beam.power == pytest.approx(32.85)
    assert baseline.trap_beam.waist_x / baseline.trap_beam.waist_y == pytest.approx(10.0)
    assert baseline.pulses.separation_tau == pytest.approx(1.0)
    assert baseline.resonance.position - baseline.pulses.base_field == pytest.approx(
        2e-5, rel=1e-10)


def test_baseline_scales_anchor_ratios(baseline):
    sc = baseline.scales()
    trap = baseline.trap_ground_state()
    assert trap.sigma_p / sc.p0 == pytest.approx(0.024, rel=0.15)
    assert (sc.delta_p / sc.p0) ** 2 == pytest.approx(0.012, rel=0.20)


def test_rejects_base_field_at_resonance(tmp_path, baseline):
    text = scenario.baseline_path().read_text()
    bad = text.replace('base_field = "543.05 G"', 'base_field = "543.30 G"')
    path = tmp_path / "bad.toml"
    path.write_text(bad)
    with pytest.raises(ConfigError, match="below the resonance"):
        load_config(path)


def test_rejects_negative_power(tmp_path):
    text = scenario.baseline_path().read_text()
    bad = text.replace('power = "32.85 W"', 'power = "-1 W"')
    path = tmp_path / "bad.toml"
    path.write_text(bad)
    with pytest.raises(ConfigError, match="power"):
        load_config(path)


def test_rejects_unknown_key(tmp_path):
    text = scenario.baseline_path().read_text() + '\n[atom2]\nx = 1\n'
    path = tmp_path / "bad.toml"
    path.write_text(text)
    with pytest.raises(ConfigError, match="atom2"):
        load_config(path)

    text2 = scenario.baseline_path().read_text().replace(
        'species = "Li-6"', 'species = "Li-6"\nbogus_key = 3')
    path2 = tmp_path / "bad2.toml"
    path2.write_text(text2)
    with pytest.raises(ConfigError, match="bogus_key"):
        load_config(path2)


def test_rejects_bad_unit_naming_token(tmp_path):
    text = scenario.baseline_path().read_text().replace(
        'waist = "216 um"', 'waist = "216 parsec"')
    path = tmp_path / "bad.toml"
    path.write_text(text)
    with pytest.raises(ConfigError, match="parsec"):
        load_config(path)


def test_parse_error_reports_location(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[atom\nspecies=3")
    with pytest.raises(ConfigError, match="parse error"):
        load_config(path)


def test_audit_baseline_passes_except_advisory_spreading(baseline):
    report = audit(baseline)
    assert report.overall
    failing = [c for c in report.checks if not c.passed]
    assert [c.name for c in failing] == ["wave_packet_spreading"]
    assert failing[0].advisory
    # the advisory check reports both the design assumption and the estimate
    assert "unchanged" in failing[0].detail or "unchanged" in failing[0].rationale
    assert "naive" in failing[0].detail


def test_audit_every_check_carries_rationale(baseline):
    report = audit(baseline)
    assert len(report.checks) == 8
    for check in report.checks:
        assert check.rationale.strip()
        assert check.name


def test_audit_is_pure(baseline):
    r1 = audit(baseline).as_dict()
    r2 = audit(baseline).as_dict()
    assert r1 == r2


def test_audit_fails_freezing_at_5x_velocity(baseline):
    # raise the pulse height so the per-atom velocity reaches ~25 mm/s
    sc = baseline.scales()
    mu = baseline.resonance.moment_difference
    extra = 24 * sc.p0**2 / baseline.mass / mu
    pulses = PulseSequence.double_square(
        baseline.pulses.base_field, baseline.pulses.pulses[0].height + extra,
        baseline.pulses.pulses[0].duration, baseline.pulses.separation_tau)
    fast = dataclasses.replace(baseline, pulses=pulses)
    assert fast.scales().velocity == pytest.approx(5 * sc.velocity, rel=1e-6)
    report = audit(fast)
    freezing = {c.name: c for c in report.checks}["transverse_freezing"]
    assert not freezing.passed
    assert not report.overall


def test_audit_fails_decoherence_at_tau_30s(baseline):
    pulses = PulseSequence.double_square(
        baseline.pulses.base_field, baseline.pulses.pulses[0].height,
        baseline.pulses.pulses[0].duration, 30.0)
    slow = dataclasses.replace(baseline, pulses=pulses)
    report = audit(slow)
    deco = {c.name: c for c in report.checks}["decoherence_budget"]
    assert not deco.passed
    assert not report.overall


def test_derived_report_values(baseline):
    doc = derived_report(baseline)
    sc = doc["scales"]
    assert sc["sigma_p_over_p0"] == pytest.approx(0.024, rel=0.15)
    assert sc["delta_p_over_p0_squared"] == pytest.approx(0.012, rel=0.20)
    assert doc["dissociation_probability"] == pytest.approx(0.04, rel=0.15)
    assert doc["guide_trap"]["transverse_frequency_Hz"] == pytest.approx(300, rel=0.10)
    assert doc["guide_trap"]["rayleigh_length_m"] == pytest.approx(0.15, rel=0.05)
    assert doc["longitudinal_trap"]["depth_from_beam_K"] == pytest.approx(50e-9, rel=0.15)
    assert doc["longitudinal_trap"]["waist_for_nominal_depth_m"] == pytest.approx(
        1.1e-2, rel=0.10)
    assert 0.05 <= doc["phase_sensitivity_rad_at_1e-5"] <= 0.5


def test_feasibility_table_renders(baseline):
    report = audit(baseline)
    table = report.table()
    assert "transverse_freezing" in table
    assert "overall" in table
