import dataclasses

import pytest

from dtebell import scenario
from dtebell.feshbach import PulseSequence
from dtebell.spectrum import build_grid


@pytest.fixture(scope="session")
def baseline():
    return scenario.load_config(scenario.baseline_path())


@pytest.fixture(scope="session")
def baseline_scales(baseline):
    return baseline.scales()


@pytest.fixture(scope="session")
def baseline_trap(baseline):
    return baseline.trap_ground_state()


@pytest.fixture(scope="session")
def fast_config(baseline):
    """Shorter pulses and separation: same physics, ~50x cheaper scans."""
    pulses = PulseSequence.double_square(
        baseline.pulses.base_field, baseline.pulses.pulses[0].height,
        duration=20e-3, separation=0.1)
    return dataclasses.replace(baseline, pulses=pulses)


@pytest.fixture(scope="session")
def fast_scales(fast_config):
    return fast_config.scales()


@pytest.fixture(scope="session")
def fast_grid(fast_config, fast_scales):
    return build_grid(fast_scales, fast_config.trap_ground_state(),
                      points=(129, 513))
