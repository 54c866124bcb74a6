import csv
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.linalg import expm

from decoq import kernels
from decoq.coefficients import (
    CSV_COLUMNS,
    build_coefficient_table,
    coefficients_at,
    cumulative_diffusion,
    dissipation_constants,
    max_coefficient_step,
)
from decoq.model import PAULI, Axis, HamiltonianParams, ValidationError

from conftest import finite_t, high_t, one_over_f, zero_t

UNDRIVEN = HamiltonianParams(1.0, 0.0, 0.0)
DRIVEN = HamiltonianParams(1.0, 0.3, 0.7)


def rotated_components(a, s, h):
    """Pauli components of U sigma_a U^dagger, U = exp(-i s (delta sz + omega . sigma))."""
    sx, sy, sz = PAULI
    u = expm(-1j * s * (h.delta * sz + h.omega_x * sx + h.omega_y * sy))
    rotated = u @ PAULI[(2, 0, 1)[a]] @ u.conj().T
    return np.array([0.5 * np.trace(p @ rotated).real for p in PAULI])


def test_zero_at_origin():
    table = build_coefficient_table([zero_t(0, 0.02), one_over_f(1, 0.1, 0.2)], DRIVEN, 1.0)
    assert np.all(table.d[0] == 0)
    assert np.all(table.f[0] == 0)


def test_one_over_f_closed_form_undriven():
    sigma, zeta = 0.2, 0.25
    table = build_coefficient_table([one_over_f(0, sigma, zeta)], UNDRIVEN, 5.0)
    exact = sigma**2 * (1 - np.exp(-2 * zeta * table.times)) / (2 * zeta)
    np.testing.assert_allclose(table.d[:, 2], exact, rtol=0, atol=1e-8)
    assert np.all(table.f == 0)


def test_high_t_constant_diffusion():
    table = build_coefficient_table([high_t(0, 0.02)], DRIVEN, 1.0)
    assert np.all(table.d[:, 2] == pytest.approx(2.0))
    assert np.all(table.d[:, :2] == 0)
    assert np.all(table.f == 0)


def test_zero_t_longitudinal_diffusion_positive_after_cutoff():
    table = build_coefficient_table([zero_t(0, 0.002, 100.0)], UNDRIVEN, 1.0, h_coeff=1e-4)
    mask = (table.times * 100 >= 1) & (table.times * 100 <= 100)
    d = table.d[mask, 2]
    assert np.all(np.isfinite(d)) and np.all(d > 0)


def test_axis_pairing_undriven():
    times = np.linspace(0, 3, 3001)
    ones = lambda s: np.ones_like(s)  # noqa: E731
    z = cumulative_diffusion(ones, Axis.LONGITUDINAL, UNDRIVEN, times)
    np.testing.assert_allclose(z[:, 2], times, atol=1e-12)
    np.testing.assert_allclose(z[:, :2], 0, atol=1e-12)
    x = cumulative_diffusion(ones, Axis.TRANSVERSE_X, UNDRIVEN, times)
    np.testing.assert_allclose(x[:, 0], np.sin(2 * times) / 2, atol=1e-10)
    np.testing.assert_allclose(x[:, 1], (np.cos(2 * times) - 1) / 2, atol=1e-10)
    np.testing.assert_allclose(x[:, 2], 0, atol=1e-12)


@pytest.mark.parametrize("axis", list(Axis))
def test_cumulative_diffusion_against_expm_quadrature(axis):
    nu = lambda s: kernels.noise_kernel_1f(s, 0.2, 0.3)  # noqa: E731
    times = np.linspace(0, 2.5, 2501)
    got = cumulative_diffusion(nu, axis, DRIVEN, times)
    for t in (0.7, 1.3, 2.5):
        k = int(round(t * 1000))
        for j in range(3):
            ref, _ = integrate.quad(lambda s: nu(s) * rotated_components(axis, -s, DRIVEN)[j], 0, t, epsabs=1e-13)
            assert got[k, j] == pytest.approx(ref, abs=1e-10)


def test_table_slots_follow_axis_pairing():
    ch = one_over_f(1, 0.2, 0.3)
    table = build_coefficient_table([ch], DRIVEN, 1.0)
    direct = cumulative_diffusion(lambda s: kernels.noise_kernel_1f(s, 0.2, 0.3), Axis.TRANSVERSE_X, DRIVEN, table.times)
    np.testing.assert_array_equal(table.d[:, 0], direct[:, 0])
    np.testing.assert_array_equal(table.f[:, 0], direct[:, 1])
    np.testing.assert_array_equal(table.f[:, 1], direct[:, 2])
    ch = one_over_f(2, 0.2, 0.3)
    table = build_coefficient_table([ch], DRIVEN, 1.0)
    direct = cumulative_diffusion(lambda s: kernels.noise_kernel_1f(s, 0.2, 0.3), Axis.TRANSVERSE_Y, DRIVEN, table.times)
    np.testing.assert_array_equal(table.f[:, 4], direct[:, 0])
    np.testing.assert_array_equal(table.d[:, 1], direct[:, 1])
    np.testing.assert_array_equal(table.f[:, 5], direct[:, 2])


def test_dissipation_constants_only_from_ohmic_channels():
    g = dissipation_constants([zero_t(0, 0.02), one_over_f(1, 0.1, 0.2)], DRIVEN)
    expected = kernels.ohmic_dissipation_rates(DRIVEN, 0.02, 0.0, 0.0)
    np.testing.assert_array_equal(g, expected)
    table = build_coefficient_table([high_t(1, 0.01)], DRIVEN, 0.5)
    np.testing.assert_array_equal(table.g[0], kernels.ohmic_dissipation_rates(DRIVEN, 0.0, 0.01, 0.0))
    assert np.all(table.g == table.g[0])


def test_interpolation_exact_at_nodes_and_linear_between():
    table = build_coefficient_table([zero_t(0, 0.02, 10.0), one_over_f(1, 0.1, 0.2)], DRIVEN, 1.0, h_coeff=0.01)
    c = coefficients_at(table, 0.37)
    np.testing.assert_array_equal(c.d, table.d[37])
    mid = coefficients_at(table, 0.375)
    np.testing.assert_allclose(mid.d, 0.5 * (table.d[37] + table.d[38]), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(mid.f, 0.5 * (table.f[37] + table.f[38]), rtol=1e-12, atol=1e-15)
    with pytest.raises(ValidationError):
        coefficients_at(table, 1.5)
    with pytest.raises(ValidationError):
        table.interpolate([-0.1])


def test_grid_convergence_second_order_between_nodes():
    chans = [zero_t(0, 0.02, 10.0), one_over_f(1, 0.1, 0.2)]
    reference = build_coefficient_table(chans, DRIVEN, 1.0, h_coeff=1e-4)
    errors = []
    for step in (0.02, 0.01, 0.005):
        # cell midpoints, where linear interpolation is least accurate
        probe = step * (np.arange(round(1.0 / step)) + 0.5)
        d = build_coefficient_table(chans, DRIVEN, 1.0, h_coeff=step).interpolate(probe)[0]
        errors.append(np.abs(d - reference.interpolate(probe)[0]).max())
    assert 3.0 < errors[0] / errors[1] < 5.0
    assert 3.0 < errors[1] / errors[2] < 5.0


def test_step_limit_enforced():
    with pytest.raises(ValidationError, match="half-period"):
        build_coefficient_table([], DRIVEN, 1.0, h_coeff=2 * max_coefficient_step(DRIVEN))


def test_finite_t_table_parallel_matches_serial():
    chans = [finite_t(0, 0.01, 10.0, 2.0), finite_t(1, 0.01, 10.0, 2.0)]
    serial = build_coefficient_table(chans, DRIVEN, 0.2, h_coeff=0.01)
    threaded = build_coefficient_table(chans, DRIVEN, 0.2, h_coeff=0.01, jobs=3)
    np.testing.assert_array_equal(serial.d, threaded.d)
    np.testing.assert_array_equal(serial.f, threaded.f)


def test_write_csv(tmp_path):
    table = build_coefficient_table([zero_t(0, 0.02, 10.0)], DRIVEN, 0.1, h_coeff=0.01)
    path = tmp_path / "c.csv"
    table.write_csv(path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == tuple(CSV_COLUMNS)
    assert len(rows) == len(table.times) + 1
    assert float(rows[5][CSV_COLUMNS.index("d_zz")]) == table.d[4, 2]
    assert math.isclose(float(rows[-1][0]), table.t_max)


def test_under_resolved_kernel_warns():
    with pytest.warns(RuntimeWarning, match="under-resolved"):
        build_coefficient_table([zero_t(0, 0.02, 100.0)], DRIVEN, 0.5, h_coeff=0.02)
