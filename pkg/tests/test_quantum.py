import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubitbell.errors import StructuralError, ValidationError
from qubitbell.linalg import kron_all, random_unitary
from qubitbell.quantum import (
    LocalMeasurement,
    QuantumStrategy,
    born_behavior,
    check_projective,
    qubit_observable_measurement,
    random_strategy,
)
from qubitbell.scenario import correlators, label_vectors, mix, validate_behavior

dims_st = st.lists(st.integers(1, 4), min_size=1, max_size=3)


def test_product_state_all_ones_deterministic():
    p1 = np.diag([1.0, 0.0])
    m = LocalMeasurement.from_outcome_one(p1, p1)
    rho = np.zeros((4, 4))
    rho[0, 0] = 1
    b = born_behavior(QuantumStrategy(rho, (m, m)))
    assert np.all(b.table[:, 0] == 1)


def test_maximally_mixed_factorizes_into_traces():
    s = random_strategy([3, 2], projective=False, seed=7)
    s = s.with_state(np.eye(6) / 6)
    b = born_behavior(s)
    for x in label_vectors(2):
        for a in label_vectors(2):
            expected = np.prod([np.trace(m.effect(a[k], x[k])).real / m.dim
                                for k, m in enumerate(s.measurements)])
            assert b.prob(a, x) == pytest.approx(expected, abs=1e-12)


def test_singlet_correlators_analytic(chsh_strategy):
    # textbook angles (0, pi/2) and (pi/4, 3pi/4); the singlet gives E = -cos(difference)
    alice, bob = [0, np.pi / 2], [np.pi / 4, 3 * np.pi / 4]
    s = QuantumStrategy(chsh_strategy.state, (qubit_observable_measurement(alice),
                                              qubit_observable_measurement(bob)))
    c = correlators(born_behavior(s))
    for x in label_vectors(2):
        assert c[x] == pytest.approx(-np.cos(alice[x[0] - 1] - bob[x[1] - 1]), abs=1e-9)
    variants = [c[(1, 1)] + c[(1, 2)] + c[(2, 1)] - c[(2, 2)],
                c[(1, 1)] + c[(1, 2)] - c[(2, 1)] + c[(2, 2)],
                c[(1, 1)] - c[(1, 2)] + c[(2, 1)] + c[(2, 2)],
                -c[(1, 1)] + c[(1, 2)] + c[(2, 1)] + c[(2, 2)]]
    assert max(abs(v) for v in variants) == pytest.approx(2 * np.sqrt(2), abs=1e-9)


def test_chsh_fixture_value(chsh_strategy):
    c = correlators(born_behavior(chsh_strategy))
    chsh = c[(1, 1)] + c[(1, 2)] + c[(2, 1)] - c[(2, 2)]
    assert chsh == pytest.approx(-2 * np.sqrt(2), abs=1e-9)


def test_random_strategy_valid_and_deterministic():
    s1 = random_strategy([2, 2], seed=11)
    s2 = random_strategy([2, 2], seed=11)
    assert s1.problems() == []
    assert np.array_equal(s1.state, s2.state)
    assert all(np.array_equal(a.effects, b.effects) for a, b in zip(s1.measurements, s2.measurements))
    assert not np.array_equal(s1.state, random_strategy([2, 2], seed=12).state)


def test_random_projective_rank_two_in_dim_four():
    s = random_strategy([4, 4], projective=True, seed=3)
    assert check_projective(s).all
    for m in s.measurements:
        for x in (1, 2):
            for a in (1, 2):
                ev = np.linalg.eigvalsh(m.effect(a, x))
                assert np.sum(ev > 0.5) == 2


def test_random_mixed_full_rank():
    s = random_strategy([2, 3], pure=False, seed=5)
    assert np.linalg.eigvalsh(s.state)[0] > 1e-8


def test_check_projective_flags():
    assert check_projective(random_strategy([2, 3], seed=1)).all
    half = LocalMeasurement.from_outcome_one(0.5 * np.eye(2), 0.5 * np.eye(2))
    flags = check_projective(QuantumStrategy(np.eye(2) / 2, (half,)))
    assert not flags.flags.any()
    # one noisy effect: A(1|2) = 0.9 P + 0.05 I
    p = np.diag([1.0, 0.0])
    noisy = LocalMeasurement.from_outcome_one(p, 0.9 * p + 0.05 * np.eye(2))
    flags = check_projective(QuantumStrategy(np.eye(2) / 2, (noisy,)))
    expected = np.array([[[True, True], [False, False]]])
    np.testing.assert_array_equal(flags.flags, expected)
    # residual oracle: (0.9P+0.05I)^2 - (0.9P+0.05I) has max entry |0.95^2 - 0.95| on P's support
    assert flags.residuals[0, 1, 0] == pytest.approx(abs(0.95 ** 2 - 0.95), abs=1e-12)


def test_invalid_inputs():
    m = LocalMeasurement.from_outcome_one(np.eye(2), np.eye(2))
    with pytest.raises(StructuralError):
        QuantumStrategy(np.eye(3) / 3, (m,))
    with pytest.raises(ValidationError, match="trace"):
        born_behavior(QuantumStrategy(np.eye(2), (m,)))
    bad = LocalMeasurement(np.array([[np.diag([1.2, 0]), np.diag([-0.2, 1])], [np.eye(2), 0 * np.eye(2)]]))
    with pytest.raises(ValidationError, match="positive"):
        born_behavior(QuantumStrategy(np.eye(2) / 2, (bad,)))
    with pytest.raises(StructuralError):
        LocalMeasurement(np.zeros((2, 3, 2, 2)))


@settings(max_examples=40, deadline=None)
@given(dims=dims_st, seed=st.integers(0, 2 ** 32 - 1), pure=st.booleans(), proj=st.booleans())
def test_contraction_matches_kron_and_normalizes(dims, seed, pure, proj):
    s = random_strategy(dims, pure=pure, projective=proj, seed=seed)
    b1 = born_behavior(s, method="contract")
    b2 = born_behavior(s, method="kron")
    np.testing.assert_allclose(b1.table, b2.table, atol=1e-12)
    assert validate_behavior(b1) == []
    np.testing.assert_allclose(b1.table.sum(axis=1), 1, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(dims=dims_st, seed=st.integers(0, 2 ** 32 - 1), lam=st.floats(0, 1))
def test_born_linear_in_state(dims, seed, lam):
    s = random_strategy(dims, projective=False, seed=seed)
    other = random_strategy(dims, pure=False, seed=seed + 1).state
    b_mix = born_behavior(s.with_state(lam * s.state + (1 - lam) * other))
    ref = mix([born_behavior(s), born_behavior(s.with_state(other))], [lam, 1 - lam])
    np.testing.assert_allclose(b_mix.table, ref.table, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(dims=dims_st, seed=st.integers(0, 2 ** 32 - 1))
def test_product_states_factorize(dims, seed):
    rng = np.random.default_rng(seed)
    locals_ = [random_strategy([d], pure=False, projective=False, seed=int(rng.integers(1 << 30)))
               for d in dims]
    s = QuantumStrategy(kron_all([l.state for l in locals_]),
                        tuple(l.measurements[0] for l in locals_))
    b = born_behavior(s)
    singles = [born_behavior(l) for l in locals_]
    for x in label_vectors(len(dims)):
        for a in label_vectors(len(dims)):
            expected = np.prod([sb.prob((a[k],), (x[k],)) for k, sb in enumerate(singles)])
            assert b.prob(a, x) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(dims=dims_st, seed=st.integers(0, 2 ** 32 - 1))
def test_local_unitary_covariance(dims, seed):
    s = random_strategy(dims, pure=False, projective=False, seed=seed)
    rng = np.random.default_rng(seed)
    us = [random_unitary(d, rng) for d in dims]
    np.testing.assert_allclose(born_behavior(s.conjugated(us)).table,
                               born_behavior(s).table, atol=1e-9)


def test_contraction_path_large_space():
    s = random_strategy([4, 4, 4, 4, 4], pure=True, seed=2)  # total dimension 1024
    b = born_behavior(s)
    assert validate_behavior(b) == []
