import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubitbell.errors import ResourceError, ValidationError
from qubitbell.linalg import random_unitary
from qubitbell.projectivize import is_projective_pair, projectivize, projectivize_strategy
from qubitbell.quantum import LocalMeasurement, QuantumStrategy, born_behavior, random_strategy
from qubitbell.scenario import mix


def random_pair(d, rng):
    u = random_unitary(d, rng)
    a1 = u @ np.diag(rng.random(d)) @ u.conj().T
    return np.array([a1, np.eye(d) - a1])


def test_projective_pair_is_fixed():
    p = np.diag([1.0, 0.0, 1.0])
    mixture = projectivize([p, np.eye(3) - p])
    assert len(mixture) == 1
    assert mixture.weights[0] == 1.0
    np.testing.assert_allclose(mixture.measurements[0][0], p, atol=1e-14)


def test_one_dimensional_povm():
    mixture = projectivize([[[0.3]], [[0.7]]])
    np.testing.assert_allclose(mixture.weights, [0.3, 0.7], atol=1e-15)
    np.testing.assert_allclose([m[0][0, 0] for m in mixture.measurements], [1.0, 0.0])


def test_two_dimensional_branching_weights():
    u = random_unitary(2, np.random.default_rng(0))
    a1 = u @ np.diag([0.3, 0.8]) @ u.conj().T
    pair = np.array([a1, np.eye(2) - a1])
    mixture = projectivize(pair)
    # oracle: products of {0.3, 0.7} x {0.8, 0.2}
    np.testing.assert_allclose(mixture.weights, [0.24, 0.06, 0.56, 0.14], atol=1e-12)
    assert np.max(np.abs(mixture.reconstruct() - pair)) < 1e-12
    assert all(is_projective_pair(m) for m in mixture.measurements)


def test_invalid_povm_rejected():
    with pytest.raises(ValidationError):
        projectivize([np.diag([1.5, 0]), np.diag([-0.5, 1])])
    with pytest.raises(ValidationError):
        projectivize([np.eye(2), np.eye(2)])


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 6), seed=st.integers(0, 2 ** 32 - 1))
def test_reconstruction_and_projectivity(d, seed):
    pair = random_pair(d, np.random.default_rng(seed))
    mixture = projectivize(pair)
    assert np.all(mixture.weights >= 0)
    assert mixture.weights.sum() == pytest.approx(1, abs=1e-9)
    assert np.max(np.abs(mixture.reconstruct() - pair)) < 1e-8
    assert all(is_projective_pair(m) for m in mixture.measurements)
    assert len(mixture) <= 2 ** d


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 5), seed=st.integers(0, 2 ** 32 - 1))
def test_idempotent_on_outputs(d, seed):
    for m in projectivize(random_pair(d, np.random.default_rng(seed))).measurements:
        again = projectivize(m)
        assert len(again) == 1
        np.testing.assert_allclose(again.measurements[0], m, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 5), seed=st.integers(0, 2 ** 32 - 1))
def test_eigenvalue_conservation(d, seed):
    pair = random_pair(d, np.random.default_rng(seed))
    lam, vecs = np.linalg.eigh(pair[0])
    mixture = projectivize(pair)
    # weighted frequency with which each eigendirection is assigned to outcome 1
    freq = [sum(w * np.real(v.conj() @ m[0] @ v) for w, m in zip(mixture.weights, mixture.measurements))
            for v in vecs.T]
    np.testing.assert_allclose(freq, lam, atol=1e-9)


def test_strategy_all_projective_single_term():
    s = random_strategy([2, 3], seed=4)
    m = projectivize_strategy(s)
    assert len(m) == 1 and m.weights[0] == 1.0


def test_strategy_four_terms_for_one_qubit():
    rng = np.random.default_rng(1)
    # each A(1|x) has exactly one fractional eigenvalue
    a = [u @ np.diag([0.0, f]) @ u.conj().T for u, f in zip([random_unitary(2, rng) for _ in range(2)], (0.4, 0.7))]
    s = QuantumStrategy(np.eye(2) / 2, (LocalMeasurement.from_outcome_one(*a),))
    assert len(projectivize_strategy(s)) == 4


def test_noisy_projectors_reconstruct(chsh_strategy):
    eta = 0.2
    ms = []
    for m in chsh_strategy.measurements:
        a1 = [(1 - eta) * m.effect(1, x) + eta * np.eye(2) / 2 for x in (1, 2)]
        ms.append(LocalMeasurement.from_outcome_one(*a1))
    s = QuantumStrategy(chsh_strategy.state, tuple(ms))
    mixture = projectivize_strategy(s)
    assert len(mixture) == 256
    rec = mix([born_behavior(t) for t in mixture.strategies], mixture.weights)
    np.testing.assert_allclose(rec.table, born_behavior(s).table, atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dims=st.sampled_from([[2], [3], [2, 2], [1, 2, 2]]))
def test_strategy_behavior_reconstruction(seed, dims):
    s = random_strategy(dims, pure=False, projective=False, seed=seed)
    mixture = projectivize_strategy(s)
    rec = mix([born_behavior(t, validate=False) for t in mixture.strategies], mixture.weights)
    np.testing.assert_allclose(rec.table, born_behavior(s).table, atol=1e-8)


def test_blowup_guard():
    s = random_strategy([4, 4], projective=False, seed=0)  # 16^4 terms
    with pytest.raises(ResourceError):
        projectivize_strategy(s)
