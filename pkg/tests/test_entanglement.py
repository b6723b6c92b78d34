import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfcomb.comb import from_cells, maximally_entangled, qudit_target_state
from qfcomb.entanglement import (
    DensityMatrix,
    EntanglementError,
    concurrence_and_eof,
    density_from_pure,
    density_from_vector,
    depolarize,
    entropies,
    entropy_report,
    fidelity,
    log_negativity,
    maximally_mixed,
    partial_trace,
    partial_transpose,
    purity,
)
from qfcomb.numerics import trace_norm

from oracles import brute_concurrence, fidelity_pure, random_density

BELL = density_from_pure(maximally_entangled(2))


def _random_pure(rng, ds, di):
    v = rng.normal(size=ds * di) + 1j * rng.normal(size=ds * di)
    return density_from_vector(v, (ds, di))


def test_bell_density_corners():
    expected = np.zeros((4, 4))
    for r in (0, 3):
        for c in (0, 3):
            expected[r, c] = 0.5
    np.testing.assert_allclose(BELL.matrix, expected, atol=1e-15)


def test_product_density():
    rho = density_from_pure(from_cells({(1, -1): 1.0}))
    assert rho.dims == (1, 1)
    assert rho.matrix[0, 0] == pytest.approx(1.0)


def test_density_validation():
    with pytest.raises(EntanglementError):
        DensityMatrix(np.diag([0.6, 0.6]), (1, 2))
    with pytest.raises(EntanglementError):
        DensityMatrix(np.diag([1.2, -0.2]), (1, 2))
    with pytest.raises(EntanglementError):
        DensityMatrix(np.eye(3) / 3, (2, 2))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pure_density_trace_and_purity(d):
    rho = density_from_pure(qudit_target_state(min(d, 3), 0.4, 0.2, 0.5, -1.0))
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)
    assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_depolarize_limits():
    np.testing.assert_allclose(depolarize(BELL, 1.0).matrix, BELL.matrix, atol=0)
    mixed = depolarize(BELL, 0.0)
    assert purity(mixed) == pytest.approx(1 / 4, abs=1e-15)
    with pytest.raises(EntanglementError):
        depolarize(BELL, 1.1)


def test_depolarized_bell_fidelity():
    rho = depolarize(BELL, 0.9)
    assert fidelity(BELL, rho) == pytest.approx(0.925, abs=1e-12)
    assert fidelity_pure(np.array([1, 0, 0, 1]) / math.sqrt(2), rho.matrix) == pytest.approx(0.925, abs=1e-15)


def test_partial_trace_bell():
    for arm in ("signal", "idler"):
        np.testing.assert_allclose(partial_trace(BELL, arm), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product_is_pure():
    rho = density_from_vector(np.kron([1, 0], [0, 1]), (2, 2))
    red = partial_trace(rho, "signal")
    assert np.trace(red @ red).real == pytest.approx(1.0)


def test_partial_trace_schmidt_spectra_agree(rng):
    rho = _random_pure(rng, 3, 5)
    ws = np.sort(np.linalg.eigvalsh(partial_trace(rho, "signal")))[::-1]
    wi = np.sort(np.linalg.eigvalsh(partial_trace(rho, "idler")))[::-1]
    np.testing.assert_allclose(ws, wi[:3], atol=1e-10)
    np.testing.assert_allclose(wi[3:], 0, atol=1e-10)


def test_entropy_bell_and_mes8():
    rep = entropy_report(partial_trace(BELL))
    assert rep.absolute == pytest.approx(1.0, abs=1e-12)
    assert rep.normalized == pytest.approx(1.0, abs=1e-12)
    rep8 = entropy_report(partial_trace(density_from_pure(maximally_entangled(8))))
    assert rep8.absolute == pytest.approx(3.0, abs=1e-12)
    assert rep8.normalized == pytest.approx(1.0, abs=1e-12)
    assert rep8.log_base == 8 and rep8.rank == 8


def test_entropy_base_validation():
    with pytest.raises(EntanglementError):
        entropy_report(np.eye(2) / 2, base_dim=1)


def test_numerical_rank_mode():
    red = np.diag([0.5, 0.5, 0.0, 0.0])
    rep = entropy_report(red, rank_mode="numerical")
    assert rep.rank == 2 and rep.log_base == 2
    assert rep.normalized == pytest.approx(1.0)
    assert entropy_report(red).normalized == pytest.approx(0.5)


def _two_mode_entropy(c):
    return entropy_report(partial_trace(density_from_pure(qudit_target_state(2, c)))).absolute


def _bisect_c(target, lo=0.0, hi=3.0):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _two_mode_entropy(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_entropy_bisection_reaches_theory_value():
    c = _bisect_c(0.361)
    assert _two_mode_entropy(c) == pytest.approx(0.361, abs=1e-3)


def test_entropy_decreasing_in_second_line_weight():
    grid = np.linspace(0, 3, 61)
    values = [_two_mode_entropy(c) for c in grid]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_entropy_phase_independent():
    a = entropy_report(partial_trace(density_from_pure(qudit_target_state(2, 0.7, phase1=0.0)))).absolute
    b = entropy_report(partial_trace(density_from_pure(qudit_target_state(2, 0.7, phase1=2.1)))).absolute
    assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_pure_state_arm_entropies_agree(ds, di, seed):
    rho = _random_pure(np.random.default_rng(seed), ds, di)
    s1, s2 = entropies(rho)
    assert s1.absolute == pytest.approx(s2.absolute, abs=1e-9)


def test_fidelity_basics(rng):
    rho = DensityMatrix(random_density(rng, 4), (2, 2))
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)
    assert fidelity(BELL, maximally_mixed((2, 2))) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(EntanglementError):
        fidelity(BELL, maximally_mixed((3, 3)))


@pytest.mark.parametrize("seed", range(5))
def test_fidelity_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = DensityMatrix(random_density(rng, 9), (3, 3))
    b = DensityMatrix(random_density(rng, 9, rank=2), (3, 3))
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-9)


def test_purity_values():
    assert purity(maximally_mixed((2, 3))) == pytest.approx(1 / 6)
    rho = depolarize(BELL, 0.9)
    brute = sum(rho.matrix[i, j] * rho.matrix[j, i] for i in range(4) for j in range(4)).real
    assert purity(rho) == pytest.approx(brute, abs=1e-15)


def test_concurrence_bell_and_product():
    c, ef = concurrence_and_eof(BELL)
    assert c == pytest.approx(1.0, abs=1e-9) and ef == pytest.approx(1.0, abs=1e-9)
    prod = density_from_vector([1, 0, 0, 0], (2, 2))
    c, ef = concurrence_and_eof(prod)
    assert c == pytest.approx(0.0, abs=1e-9) and ef == 0.0


@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 0.2, 0.9])
def test_concurrence_depolarized_bell(p):
    rho = depolarize(BELL, p)
    c, _ = concurrence_and_eof(rho)
    assert c == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-9)
    assert c == pytest.approx(brute_concurrence(rho.matrix), abs=1e-9)


def test_concurrence_random_states(rng):
    for _ in range(5):
        rho = DensityMatrix(random_density(rng, 4, rank=2), (2, 2))
        assert concurrence_and_eof(rho)[0] == pytest.approx(brute_concurrence(rho.matrix), abs=1e-8)


def test_concurrence_rejects_qutrits():
    with pytest.raises(EntanglementError):
        concurrence_and_eof(density_from_pure(maximally_entangled(3)))


def test_log_negativity_values():
    assert log_negativity(BELL) == pytest.approx(1.0, abs=1e-12)
    mes3 = density_from_pure(maximally_entangled(3))
    assert log_negativity(mes3) == pytest.approx(math.log2(3), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_log_negativity_product_states(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    b = rng.normal(size=2) + 1j * rng.normal(size=2)
    rho = density_from_vector(np.kron(a, b), (3, 2))
    assert abs(log_negativity(rho)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_log_negativity_nonnegative_and_arm_invariant(seed):
    rng = np.random.default_rng(seed)
    rho = DensityMatrix(random_density(rng, 9, rank=int(rng.integers(1, 10))), (3, 3))
    assert log_negativity(rho) >= 0
    assert trace_norm(partial_transpose(rho, "signal")) == pytest.approx(
        trace_norm(partial_transpose(rho, "idler")), abs=1e-10
    )


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_depolarize_properties(seed, p):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=9) + 1j * rng.normal(size=9)
    psi = density_from_vector(v, (3, 3))
    mixed = depolarize(psi, p)
    assert purity(mixed) <= purity(psi) + 1e-12
    assert fidelity(mixed, psi) == pytest.approx(p + (1 - p) / 9, abs=1e-10)


def test_density_from_vector_dims_mismatch():
    with pytest.raises(EntanglementError):
        density_from_vector([1.0, 0.0, 0.0], (2, 2))
