import math

import numpy as np
import pytest

from decoq.model import Axis, HamiltonianParams, NoiseChannelSpec, NoiseModel

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    """Log one pass/fail line per acceptance criterion, then assert it."""

    def _record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _record


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def high_t(axis, gamma, temperature=100.0):
    return NoiseChannelSpec(Axis(axis), NoiseModel.OHMIC_HIGH_T, gamma=gamma, temperature=temperature)


def zero_t(axis, gamma, cutoff=100.0):
    return NoiseChannelSpec(Axis(axis), NoiseModel.OHMIC_ZERO_T, gamma=gamma, cutoff=cutoff)


def finite_t(axis, gamma, cutoff, temperature):
    return NoiseChannelSpec(Axis(axis), NoiseModel.OHMIC_FINITE_T, gamma=gamma, cutoff=cutoff, temperature=temperature)


def one_over_f(axis, sigma, zeta):
    return NoiseChannelSpec(Axis(axis), NoiseModel.ONE_OVER_F, sigma=sigma, zeta=zeta)


def random_params(rng):
    return HamiltonianParams(1.0, rng.uniform(0, 2), rng.uniform(-math.pi, math.pi))
