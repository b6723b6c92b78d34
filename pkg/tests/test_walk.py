import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfcomb.comb import ModeConvention, PhaseMask, WeightSpec, from_cells, maximally_entangled, synthesize
from qfcomb.numerics import bessel_j
from qfcomb.walk import (
    CALIBRATED_G1,
    EOMConfig,
    EnergyScale,
    WalkConfigError,
    chi_expectation,
    desync_average,
    embed,
    energy_distribution,
    energy_transfer_rate,
    eom_unitary,
    evolve,
    interior_unitarity_error,
    lattice_for,
    mean_total_energy,
    pes_example,
    sweep_and_slope,
)

from oracles import bessel_series_exact

UNIFORM = PhaseMask.zeros()
ALT_PI = PhaseMask.pattern(odd=0.0, even=math.pi)
ALT_HALF_PI = PhaseMask.pattern(odd=0.0, even=math.pi / 2)


def _energy_after(state, delta, phi_rf=math.pi / 2):
    return mean_total_energy(evolve(state, lattice_for(state, delta, phi_rf=phi_rf)))


def _expm_hopping(n, delta, phi_rf, g1_abs=CALIBRATED_G1):
    """exp(-i delta (g1 chi + g1* chi^H)) by diagonalizing the tridiagonal
    hopping matrix with numpy (independent of the Bessel construction)."""
    g1 = g1_abs * np.exp(1j * phi_rf)
    h = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        h[k + 1, k] = g1
        h[k, k + 1] = np.conj(g1)
    w, v = np.linalg.eigh(h)
    return v @ np.diag(np.exp(-1j * delta * w)) @ v.conj().T


def test_zero_depth_is_identity():
    cfg = EOMConfig(0.0)
    np.testing.assert_allclose(eom_unitary(cfg), np.eye(len(cfg.modes)), atol=0)


def test_interior_unitarity():
    cfg = EOMConfig(1.5, guard=16)
    u = eom_unitary(cfg)
    assert interior_unitarity_error(u, cfg) < 1e-10


def test_first_sideband_entry():
    cfg = EOMConfig(1.0, phi_rf=0.7)
    u = eom_unitary(cfg)
    m = cfg.modes.index(0)
    expected = bessel_series_exact(1, 1) * np.exp(1j * (0.7 - math.pi / 2))
    assert abs(u[m + 1, m] - expected) < 1e-12
    assert abs(u[m, m] - bessel_series_exact(0, 1)) < 1e-12


@pytest.mark.parametrize("delta,phi", [(0.5, 0.0), (1.3, math.pi / 2), (2.7, 2.0)])
def test_unitary_matches_hopping_exponential(delta, phi):
    cfg = EOMConfig(delta, phi_rf=phi, lattice=(-3, 3))
    u = eom_unitary(cfg)
    ref = _expm_hopping(len(cfg.modes) + 60, delta, phi)[30:-30, 30:-30]
    np.testing.assert_allclose(u[cfg.interior, cfg.interior], ref[cfg.interior, cfg.interior], atol=1e-12)


def test_guard_validation():
    with pytest.raises(WalkConfigError):
        EOMConfig(3.0, guard=8)
    with pytest.raises(WalkConfigError):
        EOMConfig(-0.1)
    assert EOMConfig(3.0).guard == 11


def test_state_outside_lattice_rejected():
    cfg = EOMConfig(0.5, lattice=(-2, 2))
    with pytest.raises(WalkConfigError):
        evolve(maximally_entangled(4), cfg)
    with pytest.raises(WalkConfigError):
        embed(maximally_entangled(4), tuple(range(-2, 3)))


@pytest.mark.parametrize("delta", [0.5, 1.0, 2.0, 3.0])
def test_norm_conservation(delta):
    state = synthesize(ModeConvention(17), WeightSpec.gaussian(2.0, 2))
    out = evolve(state, lattice_for(state, delta))
    assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-9


@pytest.mark.parametrize("d", [2, 4, 8])
@pytest.mark.parametrize("delta", [0.5, 1.0, 2.0, 3.0])
def test_mes_has_no_energy_shift(d, delta):
    state = maximally_entangled(d)
    assert abs(_energy_after(state, delta) - mean_total_energy(state)) < 1e-9


def test_chi_values():
    assert abs(chi_expectation(maximally_entangled(8))) < 1e-15
    assert chi_expectation(pes_example(0.0)) == pytest.approx(1.0, abs=1e-15)
    assert chi_expectation(pes_example(math.pi)) == pytest.approx(-1.0, abs=1e-15)
    assert chi_expectation(from_cells({(1, -1): 1.0})) == 0


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi))
def test_pes_chi_is_cos_phi(phi):
    assert chi_expectation(pes_example(phi)) == pytest.approx(math.cos(phi), abs=1e-14)


def test_transfer_rates():
    scale = EnergyScale()
    assert energy_transfer_rate(pes_example(0.0), scale) == pytest.approx(1.0, abs=1e-15)
    assert energy_transfer_rate(pes_example(math.pi), scale) == pytest.approx(-1.0, abs=1e-15)
    assert energy_transfer_rate(pes_example(0.0), scale.with_phase(0.0)) == pytest.approx(0.0, abs=1e-15)
    assert energy_transfer_rate(maximally_entangled(4), scale) == 0.0


@pytest.mark.parametrize("grid", [4, 360])
def test_desync_average_vanishes(grid):
    assert abs(desync_average(pes_example(0.3), EnergyScale(), grid)) < 1e-12


def test_desync_grid_validation():
    with pytest.raises(ValueError):
        desync_average(pes_example(0.0), EnergyScale(), grid=3)


@pytest.mark.parametrize("phi", [0.0, math.pi, 1.0])
def test_finite_difference_matches_rate(phi):
    state = pes_example(phi)
    h = 1e-4
    fd = (_energy_after(state, h) - mean_total_energy(state)) / h
    rate = energy_transfer_rate(state, EnergyScale())
    assert fd == pytest.approx(rate, abs=1e-6)
    # calibrated units: divide by |g1|
    assert fd / CALIBRATED_G1 == pytest.approx(2 * math.cos(phi), abs=1e-5)


def test_energy_linear_in_depth():
    # <E>(delta) - <E>(0) = delta * Im(exp(i phi_rf) <chi>) on an unbounded lattice
    state = synthesize(ModeConvention(17), WeightSpec.gaussian(2.0, 2))
    chi = chi_expectation(state)
    for delta in (0.5, 1.7, 3.0):
        shift = _energy_after(state, delta) - mean_total_energy(state)
        assert shift == pytest.approx(delta * chi.real, abs=1e-9)


def test_energy_distribution_sums_to_one():
    levels, dist = energy_distribution(pes_example(0.0))
    assert list(levels) == [-1, 0, 1]
    np.testing.assert_allclose(dist, [0.25, 0.5, 0.25], atol=1e-15)


GRID = np.linspace(0.0, 3.0, 13)
FIVE_LINE_STATE = synthesize(ModeConvention(17), WeightSpec.gaussian(2.0, 2))


def test_sweep_dichotomy():
    up = sweep_and_slope(FIVE_LINE_STATE, UNIFORM, GRID)
    down = sweep_and_slope(FIVE_LINE_STATE, ALT_PI, GRID)
    flat = sweep_and_slope(FIVE_LINE_STATE, ALT_HALF_PI, GRID)
    assert up.slope > 0 and np.all(np.diff(up.mean_energy) > 0)
    np.testing.assert_allclose(down.mean_energy, -up.mean_energy, atol=1e-9)
    assert np.max(np.abs(flat.mean_energy)) <= 1e-3 * np.max(np.abs(up.mean_energy))
    assert up.residual < 1e-9
    assert up.distributions.shape == (len(GRID), len(up.energy_levels))
    np.testing.assert_allclose(up.distributions.sum(axis=1), 1.0, atol=1e-9)


def test_sweep_mirror_distributions():
    up = sweep_and_slope(FIVE_LINE_STATE, UNIFORM, GRID)
    down = sweep_and_slope(FIVE_LINE_STATE, ALT_PI, GRID)
    np.testing.assert_allclose(down.distributions, up.distributions[:, ::-1], atol=1e-12)
    assert list(up.energy_levels) == [-v for v in up.energy_levels[::-1]]


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep_and_slope(FIVE_LINE_STATE, UNIFORM, [0.5, 1.0])
    with pytest.raises(ValueError):
        sweep_and_slope(FIVE_LINE_STATE, UNIFORM, [0.0])


def test_slope_grows_with_dimension():
    slopes = []
    for d in range(4, 11):
        state = synthesize(ModeConvention(2 * d + 1), WeightSpec.gaussian(2.0, 2))
        slopes.append(sweep_and_slope(state, UNIFORM, np.linspace(0, 2, 5)).slope)
    assert all(b > a for a, b in zip(slopes, slopes[1:]))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 2 * math.pi), st.floats(0.1, 2.5))
def test_rf_phase_rotates_shift(phi_rf, delta):
    state = pes_example(0.4)
    shift = _energy_after(state, delta, phi_rf) - mean_total_energy(state)
    chi = chi_expectation(state)
    assert shift == pytest.approx(delta * (np.exp(1j * phi_rf) * chi).imag, abs=1e-9)


def test_sideband_intensities_for_single_photon_pair():
    # |1,-1> scattered: P(s, i) = J_{s-1}(delta)^2 J_{i+1}(delta)^2
    delta = 1.2
    out = evolve(from_cells({(1, -1): 1.0}), lattice_for(from_cells({(1, -1): 1.0}), delta))
    for s in (0, 1, 2, 3):
        for i in (-3, -1, 0):
            expected = bessel_j(s - 1, delta) ** 2 * bessel_j(i + 1, delta) ** 2
            assert abs(out.amplitude(s, i)) ** 2 == pytest.approx(expected, abs=1e-12)
