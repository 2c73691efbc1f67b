import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmeasure.errors import GridTooSmallError, IllDefinedPhaseError, InvalidBoundsError, InvalidSpecError
from qmeasure.state_fields import (
    Constants,
    GaussianPacket,
    OscillatorGround,
    ProbabilityFields,
    WaveFunction,
    auto_grid,
    fields_from_wavefunction,
    make_grid,
    momentum_density,
    synthesize,
    total_current,
    total_probability,
    wavefunction_from_fields,
)

from conftest import reference_fields


def test_make_grid_spacing():
    grid = make_grid(-12, 12, 2048)
    assert grid.dx == 24 / 2047
    assert np.allclose(np.diff(grid.points), grid.dx, rtol=0, atol=1e-13)
    assert grid.points[0] == -12 and grid.points[-1] == pytest.approx(12, abs=1e-12)


def test_make_grid_small():
    grid = make_grid(0, 1, 16)
    assert grid.n == 16 and grid.dx == pytest.approx(1 / 15, rel=1e-15)


@pytest.mark.parametrize("args", [(1, 1, 64), (2, 1, 64), (0, 1, 15), (0, 1, 20.5)])
def test_make_grid_rejects_degenerate(args):
    with pytest.raises(InvalidBoundsError):
        make_grid(*args)


def test_auto_grid_span_rule():
    grid = auto_grid(GaussianPacket(0, 1, 0), [0.5])
    assert grid.x_max >= 10 * math.sqrt(1.25) - 1e-12
    assert grid.x_min <= -10 * math.sqrt(1.25) + 1e-12
    assert grid.n == 4096


def test_auto_grid_without_kernels():
    grid = auto_grid(GaussianPacket(3.0, 2.0, 0), [])
    assert grid.x_min == pytest.approx(3.0 - 20.0) and grid.x_max == pytest.approx(23.0)


def test_auto_grid_oscillator():
    grid = auto_grid(OscillatorGround(1.0), [], Constants(1, 1))
    assert grid.x_max == pytest.approx(10 * math.sqrt(0.5))
    assert (grid.n & (grid.n - 1)) == 0 and grid.n >= 1024


def test_auto_grid_refines_for_narrow_kernel():
    grid = auto_grid(GaussianPacket(0, 1, 0), [0.001])
    assert grid.dx <= 0.001 / 2


def test_invalid_specs():
    with pytest.raises(InvalidSpecError):
        GaussianPacket(sigma=0)
    with pytest.raises(InvalidSpecError):
        OscillatorGround(omega=-1)
    with pytest.raises(InvalidSpecError):
        Constants(hbar=0)


def test_synthesize_normalized_with_linear_phase():
    spec = GaussianPacket(0, 1, 2)
    psi = synthesize(spec, auto_grid(spec))
    assert abs(psi.norm() - 1) <= 1e-10
    assert np.allclose(psi.phase, 2 * psi.grid.points)


def test_oscillator_is_gaussian_with_ground_width():
    packet = OscillatorGround(1.0).as_packet(Constants(1, 1))
    assert packet.sigma == pytest.approx(0.7071067811865476, rel=1e-15)
    assert packet.x0 == 0 and packet.k == 0


def test_zero_wavenumber_is_real():
    spec = GaussianPacket(0, 1, 0)
    psi = synthesize(spec, auto_grid(spec))
    assert np.all(psi.samples.imag == 0)


def test_synthesize_grid_too_small():
    with pytest.raises(GridTooSmallError):
        synthesize(GaussianPacket(0, 1, 0), make_grid(-5, 5, 256))


def test_current_is_wavenumber_times_density():
    spec = GaussianPacket(0, 1, 2)
    fields = fields_from_wavefunction(synthesize(spec, auto_grid(spec)))
    assert np.allclose(fields.j, 2 * fields.rho, rtol=1e-8, atol=0)


def test_constant_phase_has_no_current():
    spec = GaussianPacket(0, 1, 0)
    grid = auto_grid(spec)
    psi = synthesize(spec, grid)
    fields = fields_from_wavefunction(WaveFunction(grid, psi.modulus, np.full(grid.n, 0.3)))
    assert np.all(fields.j == 0)


def test_density_at_centre():
    spec = GaussianPacket(0, 1, 0)
    grid = make_grid(-10, 10, 2001)  # x = 0 is a grid point
    fields = fields_from_wavefunction(synthesize(spec, grid))
    assert fields.rho[1000] == pytest.approx(0.39894228040143268, rel=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(0.3, 3.0), st.floats(-4, 4))
def test_packet_current_integrates_to_hbar_k_over_m(x0, sigma, k):
    spec = GaussianPacket(x0, sigma, k)
    consts = Constants(hbar=0.7, mass=1.9)
    fields = fields_from_wavefunction(synthesize(spec, auto_grid(spec), consts), consts)
    expected = consts.hbar * k / consts.mass
    assert total_probability(fields) == pytest.approx(1.0, abs=1e-10)
    assert total_current(fields) == pytest.approx(expected, rel=1e-8, abs=1e-14)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_modulus_derivative_accuracy(sigma):
    spec = GaussianPacket(0.3, sigma, 0)
    grid = auto_grid(spec, n=4096)
    psi = synthesize(spec, grid)
    x = grid.points
    exact = -(x - 0.3) / (2 * sigma**2) * psi.modulus
    region = np.abs(x - 0.3) <= 5 * sigma
    err = np.abs(grid.derivative(psi.modulus) - exact)[region].max()
    assert err <= 1e-6 * np.abs(exact[region]).max()


def _round_trip_defect(fields):
    back = fields_from_wavefunction(wavefunction_from_fields(fields))
    region = fields.rho > 1e-12 * fields.rho.max()
    rho_err = np.abs(back.rho - fields.rho)[region] / fields.rho[region]
    j_ref = np.abs(fields.j[region])
    j_err = np.abs(back.j - fields.j)[region] / np.where(j_ref > 0, j_ref, 1.0)
    return max(rho_err.max(), j_err.max())


def test_round_trip_of_in_fields_recovers_wavefunction():
    spec = GaussianPacket(0, 1, 2)
    grid = auto_grid(spec)
    psi = synthesize(spec, grid)
    fields = fields_from_wavefunction(psi)
    rebuilt = wavefunction_from_fields(fields)
    # equal up to a global phase
    rel = rebuilt.samples * np.conj(psi.samples)
    overlap = grid.integrate(rel)
    assert abs(overlap) == pytest.approx(1.0, abs=1e-10)
    assert np.abs(rebuilt.samples - psi.samples * overlap).max() < 1e-9


def test_zero_current_rebuilds_real_root_density():
    fields_in, _ = reference_fields(0.0, 0.0)
    still = ProbabilityFields(fields_in.grid, fields_in.rho, np.zeros(fields_in.grid.n))
    psi = wavefunction_from_fields(still)
    assert np.all(psi.phase == 0)
    assert np.allclose(psi.modulus, np.sqrt(fields_in.rho))


def test_round_trip_out_fields():
    _, out = reference_fields(0.3, 0.7)
    assert _round_trip_defect(out) <= 1e-8


def test_ill_defined_phase():
    grid = make_grid(-5, 5, 101)
    rho = np.where(np.abs(grid.points) < 2, 1.0, 0.0)
    j = np.ones(grid.n) * 0.5
    with pytest.raises(IllDefinedPhaseError):
        wavefunction_from_fields(ProbabilityFields(grid, rho, j))


def test_scaled_density_doubles_probability():
    fields_in, _ = reference_fields(0.0, 0.0)
    assert total_probability(fields_in) == pytest.approx(1, abs=1e-10)
    assert total_probability(fields_in.scaled(2)) == pytest.approx(2, abs=2e-10)


def test_out_density_total_probability(sweep_fields):
    _, out = reference_fields(0.5, 0.0)
    assert total_probability(out) == pytest.approx(1, abs=1e-8)


def test_negative_density_rejected():
    grid = make_grid(0, 1, 16)
    with pytest.raises(ValueError):
        ProbabilityFields(grid, -np.ones(16), np.zeros(16))


def test_momentum_density_of_packet():
    spec = GaussianPacket(0, 1, 2)
    psi = synthesize(spec, auto_grid(spec))
    p, dens = momentum_density(psi)
    dp = p[1] - p[0]
    mean = np.sum(p * dens) * dp
    var = np.sum((p - mean) ** 2 * dens) * dp
    assert mean == pytest.approx(2.0, abs=1e-10)
    assert math.sqrt(var) == pytest.approx(0.5, rel=1e-8)
