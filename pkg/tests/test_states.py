import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import SX, SY, SZ, random_matrix
from obsalg.matrix_algebra import full_algebra, generate_algebra, operator_norm
from obsalg.states import (
    State,
    StateError,
    deviation,
    eigenstates,
    expectation,
    functional_matrix,
    positivity_report,
    separates,
    simulate_measurements,
    spectral_projections,
    tomographic_states,
)

KET0 = np.array([1, 0])
KET1 = np.array([0, 1])
PLUS = np.array([1, 1]) / np.sqrt(2)


@pytest.mark.parametrize(
    "state, obs, expected",
    [(State.mixed(2), SZ, 0.0), (State.pure(KET0), SZ, 1.0), (State.pure(PLUS), SX, 1.0)],
)
def test_expectation_examples(state, obs, expected):
    assert expectation(state, obs) == pytest.approx(expected, abs=1e-15)


def test_expectation_dimension_mismatch():
    with pytest.raises(StateError):
        expectation(State.mixed(2), np.eye(3))


@pytest.mark.parametrize(
    "state, obs, expected",
    [(State.pure(KET0), SZ, 0.0), (State.mixed(2), SZ, 1.0), (State.pure(PLUS), SZ, 1.0)],
)
def test_deviation_examples(state, obs, expected):
    assert deviation(state, obs) == pytest.approx(expected, abs=1e-15)


def test_deviation_rejects_non_hermitian():
    with pytest.raises(StateError):
        deviation(State.mixed(2), np.array([[0, 1], [0, 0]]))


def test_state_validation():
    with pytest.raises(StateError):
        State(np.array([[1, 1], [0, 0]]))
    with pytest.raises(StateError):
        State(np.eye(2))
    with pytest.raises(StateError):
        State(np.diag([1.5, -0.5]))
    State(np.diag([1 + 1e-11, -1e-11]))


def test_measurement_eigenstate_is_exact():
    rec = simulate_measurements(State.pure(KET0), SZ, 1000, seed=3)
    assert np.all(rec.outcomes == 1.0)
    assert rec.empirical_mean == 1.0


def test_measurement_mixed_within_four_standard_errors():
    n = 100_000
    rec = simulate_measurements(State.mixed(2), SZ, n, seed=8)
    assert abs(rec.empirical_mean) < 4 / math.sqrt(n)


def test_measurement_rejects_zero_samples():
    with pytest.raises(StateError):
        simulate_measurements(State.mixed(2), SZ, 0, seed=0)


def test_measurement_invariants_and_reproducibility():
    rng = np.random.default_rng(1)
    s = State.random(3, rng)
    a = np.diag([2.0, 2.0, -1.0])
    r1 = simulate_measurements(s, a, 5000, seed=42)
    r2 = simulate_measurements(s, a, 5000, seed=42)
    assert np.array_equal(r1.outcomes, r2.outcomes)
    assert r1.empirical_mean == r2.empirical_mean
    assert set(np.unique(r1.outcomes)) <= {2.0, -1.0}
    assert r1.empirical_mean == math.fsum(r1.outcomes.tolist()) / 5000


def test_measurement_degenerate_eigenvalues_merge():
    values, projs = spectral_projections(np.diag([1.0, 1.0, 3.0]))
    assert values.tolist() == [1.0, 3.0]
    assert np.allclose(projs[0], np.diag([1, 1, 0]))


def test_measurement_csv_export():
    rec = simulate_measurements(State.pure(KET1), SZ, 3, seed=5)
    lines = rec.to_csv().splitlines()
    assert lines[0].startswith("# seed=5 mean=-1.0")
    assert lines[1] == "index,outcome"
    assert lines[2:] == ["0,-1.0", "1,-1.0", "2,-1.0"]


def test_measurement_mean_within_six_sigma():
    rng = np.random.default_rng(12)
    flagged = 0
    for k in range(10):
        n = int(rng.integers(2, 5))
        s = State.random(n, rng)
        g = random_matrix(n, rng)
        a = g + g.conj().T
        rec = simulate_measurements(s, a, 10_000, seed=k)
        sigma = deviation(s, a) / math.sqrt(10_000)
        err = abs(rec.empirical_mean - expectation(s, a).real)
        assert err < 6 * sigma
        flagged += err > 4 * sigma
    assert flagged <= 1


def test_separates_examples():
    assert separates(tomographic_states(2), full_algebra(2))
    assert not separates([State.mixed(2)], full_algebra(2))
    assert separates([State.random(3, np.random.default_rng(0))], generate_algebra([], n=3))
    with pytest.raises(StateError):
        separates([], full_algebra(2))


def test_tomographic_states_are_complete():
    for n in (2, 3, 4):
        f = functional_matrix(tomographic_states(n), full_algebra(n))
        assert np.linalg.matrix_rank(f) == n * n


def test_positivity_report_examples():
    r = positivity_report(SZ, eigenstates(SZ))
    assert r.min_expectation == pytest.approx(-1) and r.min_eigenvalue == pytest.approx(-1) and r.agree
    r = positivity_report(np.eye(2), [State.mixed(2), State.pure(KET0)])
    assert r.min_expectation == pytest.approx(1.0)
    r = positivity_report(SX, [State.mixed(2)])
    assert r.min_expectation == pytest.approx(0.0)
    assert r.min_eigenvalue == pytest.approx(-1.0)
    assert not r.agree and r.insufficient_family


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_state_functional_properties(seed, n):
    rng = np.random.default_rng(seed)
    s = State.random(n, rng)
    b = random_matrix(n, rng)
    c = random_matrix(n, rng)
    tol = 1e-10 * (1 + np.linalg.norm(b) * np.linalg.norm(c))
    # positivity
    assert expectation(s, b.conj().T @ b).real >= -tol
    # |omega(a)| <= ||a||
    assert abs(expectation(s, b)) <= operator_norm(b) + 1e-12 * operator_norm(b)
    # Cauchy-Schwarz
    lhs = abs(expectation(s, b.conj().T @ c))
    rhs = math.sqrt(max(expectation(s, b.conj().T @ b).real, 0)) * math.sqrt(max(expectation(s, c.conj().T @ c).real, 0))
    assert lhs <= rhs + tol


def test_expectation_real_for_hermitian():
    rng = np.random.default_rng(0)
    s = State.random(4, rng)
    g = random_matrix(4, rng)
    assert abs(expectation(s, g + g.conj().T).imag) < 1e-12


def test_pauli_expectations_reconstruct_state():
    rng = np.random.default_rng(1)
    s = State.random(2, rng)
    r = [expectation(s, p).real for p in (SX, SY, SZ)]
    rho = 0.5 * (np.eye(2) + r[0] * SX + r[1] * SY + r[2] * SZ)
    assert np.allclose(rho, s.rho)
