import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import proj, two_angle_measurement, unit
from qubitbell.compression import block_index, compress, party_jordan_blocks
from qubitbell.errors import PreconditionError
from qubitbell.linalg import kron_all, random_mixed_state, random_unitary
from qubitbell.quantum import (
    LocalMeasurement,
    QuantumStrategy,
    born_behavior,
    qubit_observable_measurement,
)


def dense_g_spectrum(m):
    """Oracle: nonzero eigenvalues of A(1|1) A(1|2) A(1|1) on the full space."""
    p, q = m.effect(1, 1), m.effect(1, 2)
    ev = np.linalg.eigvalsh(p @ q @ p)
    return np.sort(ev[ev > 1e-9])


def test_qubit_block():
    m = qubit_observable_measurement([0, np.pi / 2])
    pb = party_jordan_blocks(m)
    assert pb.r == 1
    # the observables are Z and X: the rank-one projectors meet at pi/4
    assert pb.blocks[0].angle == pytest.approx(np.pi / 4, abs=1e-12)
    assert pb.blocks[0].g_eigenvalue == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(pb.blocks[0].projector, np.eye(2), atol=1e-12)


def test_two_angle_unit_case():
    m = two_angle_measurement()
    pb = party_jordan_blocks(m)
    assert pb.r == 2
    g = [b.g_eigenvalue for b in pb.blocks]
    np.testing.assert_allclose(g, [np.cos(np.pi / 5) ** 2, np.cos(np.pi / 7) ** 2], atol=1e-10)
    np.testing.assert_allclose(g, dense_g_spectrum(m), atol=1e-10)
    e = [unit(4, i) for i in range(4)]
    np.testing.assert_allclose(pb.blocks[0].projector, proj(e[0], e[2]), atol=1e-10)
    np.testing.assert_allclose(pb.blocks[1].projector, proj(e[1], e[3]), atol=1e-10)
    assert abs(abs(pb.blocks[0].frame[0, 0]) - 1) < 1e-10
    assert abs(abs(pb.blocks[1].frame[1, 0]) - 1) < 1e-10


def test_block_projectors_from_effect_images():
    # E_k = span{A(1|2) v_k, A(2|2) v_k}
    m = two_angle_measurement()
    for b in party_jordan_blocks(m).blocks:
        v = b.frame[:, 0]
        pair = np.column_stack([m.effect(1, 2) @ v, m.effect(2, 2) @ v])
        q, _ = np.linalg.qr(pair)
        np.testing.assert_allclose(q @ q.conj().T, b.projector, atol=1e-10)


def test_block_structure_laws():
    rng = np.random.default_rng(3)
    u = random_unitary(6, rng)
    e = [unit(6, i) for i in range(6)]
    angles = [0.3, 0.7, 1.1]
    p = proj(e[0], e[1], e[2])
    q = proj(*[np.cos(t) * e[i] + np.sin(t) * e[i + 3] for i, t in enumerate(angles)])
    m = LocalMeasurement.from_outcome_one(u @ p @ u.conj().T, u @ q @ u.conj().T)
    pb = party_jordan_blocks(m)
    projs = [b.projector for b in pb.blocks]
    # orthogonal and complete
    np.testing.assert_allclose(sum(projs), np.eye(6), atol=1e-10)
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.max(np.abs(projs[i] @ projs[j])) < 1e-10
    np.testing.assert_allclose(pb.unitary().conj().T @ pb.unitary(), np.eye(6), atol=1e-10)
    # each block is invariant and meets all four ranges in one dimension
    for b, pr in zip(pb.blocks, projs):
        for x in (1, 2):
            for a in (1, 2):
                eff = m.effect(a, x)
                assert np.max(np.abs(eff @ pr - pr @ eff)) < 1e-10
                assert np.linalg.matrix_rank(pr @ eff @ pr, tol=1e-8) == 1
    np.testing.assert_allclose(sorted(b.angle for b in pb.blocks), angles, atol=1e-10)


def test_degenerate_angles_any_eigenbasis():
    t = np.pi / 6
    m = two_angle_measurement(t, t)
    rho = random_mixed_state(8, np.random.default_rng(0))
    s = QuantumStrategy(rho, (m, qubit_observable_measurement([0.2, 1.4])))
    target = born_behavior(s).table
    c, sn = np.cos(0.4), np.sin(0.4)
    for basis in (np.eye(2), np.array([[c, -sn], [sn, c]])):
        bd = compress(s, eigenbases=[basis, None])
        np.testing.assert_allclose([b.g_eigenvalue for b in bd.party_blocks[0].blocks],
                                   [np.cos(t) ** 2] * 2, atol=1e-10)
        np.testing.assert_allclose(bd.reconstruct_behavior().table, target, atol=1e-10)


def test_bad_eigenbasis_rejected():
    m = two_angle_measurement()
    with pytest.raises(PreconditionError):
        party_jordan_blocks(m, eigenbasis=np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_overlapping_party_rejected():
    p = proj(unit(2, 0))
    with pytest.raises(PreconditionError):
        party_jordan_blocks(LocalMeasurement.from_outcome_one(p, p))


def test_product_state_block_weights():
    e = [unit(4, i) for i in range(4)]
    rho = kron_all([proj(e[0]), np.eye(2) / 2])
    s = QuantumStrategy(rho, (two_angle_measurement(), qubit_observable_measurement([0, np.pi / 2])))
    bd = compress(s)
    assert bd.weights[(1, 1)] == pytest.approx(1, abs=1e-12)
    assert bd.weights[(2, 1)] == pytest.approx(0, abs=1e-12)
    assert bd.retained() == [(1, 1)]
    np.testing.assert_allclose(bd.reconstruct_behavior().table, born_behavior(s).table, atol=1e-12)


def test_block_index_party_one_most_significant():
    assert block_index((1, 1), (2, 3)) == 0
    assert block_index((1, 3), (2, 3)) == 2
    assert block_index((2, 1), (2, 3)) == 3


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_random_rotated_mixture_identity(seed):
    rng = np.random.default_rng(seed)
    ms = []
    for _ in range(2):
        u = random_unitary(4, rng)
        t1, t2 = rng.uniform(0.1, np.pi / 2 - 0.1, size=2)
        ms.append(two_angle_measurement(t1, t2).conjugated(u))
    s = QuantumStrategy(random_mixed_state(16, rng), tuple(ms))
    bd = compress(s)
    assert sum(bd.weights.values()) == pytest.approx(1, abs=1e-10)
    np.testing.assert_allclose(bd.reconstruct_behavior().table, born_behavior(s).table, atol=1e-10)
    for k in bd.retained():
        assert bd.qubit_strategy(k).problems() == []

    # local unitaries move the frames but not the angles or the weights
    vs = [random_unitary(4, rng) for _ in range(2)]
    bd2 = compress(s.conjugated(vs))
    for pb1, pb2 in zip(bd.party_blocks, bd2.party_blocks):
        np.testing.assert_allclose([b.angle for b in pb1.blocks], [b.angle for b in pb2.blocks],
                                   atol=1e-9)
    for k in bd.weights:
        assert bd2.weights[k] == pytest.approx(bd.weights[k], abs=1e-9)
