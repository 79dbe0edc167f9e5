"""Jordan-block compression of a party's projector pairs into qubit blocks.

For a party in overlap-free, rank-balanced form, the eigenvectors ``v_k`` of
G = A(1|1) A(1|2) A(1|1) restricted to range A(1|1) come with two-dimensional
subspaces E_k = span{A(1|2) v_k, A(2|2) v_k}. These blocks are invariant
under all four effects, mutually orthogonal and complete, so the behavior is
a mixture of N-qubit behaviors, one per choice of block for every party.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalConsistencyError, PreconditionError
from .linalg import apply_product, clean_state, dagger, projector_onto, range_basis
from .quantum import LocalMeasurement, QuantumStrategy, born_behavior
from .reduction import party_overlaps
from .scenario import Behavior, mix

DEGENERACY_TOL = 1e-8
BLOCK_TOL = 1e-8
WEIGHT_CUTOFF = 1e-12


@dataclass(frozen=True)
class JordanBlock:
    frame: np.ndarray = field(repr=False)  # d x 2 isometry, columns (v_k, v_k_perp)
    angle: float  # cos(angle)**2 is the G eigenvalue of v_k
    effects: np.ndarray = field(repr=False)  # (2, 2, 2, 2) qubit effects in the frame

    @property
    def projector(self) -> np.ndarray:
        return projector_onto(self.frame)

    @property
    def g_eigenvalue(self) -> float:
        return float(np.cos(self.angle) ** 2)

    def measurement(self) -> LocalMeasurement:
        return LocalMeasurement(self.effects)


@dataclass(frozen=True)
class PartyBlocks:
    party: int  # 1-based
    blocks: tuple

    @property
    def r(self) -> int:
        return len(self.blocks)

    def unitary(self) -> np.ndarray:
        """Columns: the block frames side by side."""
        return np.hstack([b.frame for b in self.blocks])


def party_jordan_blocks(m: LocalMeasurement, party: int = 1,
                        eigenbasis: np.ndarray | None = None) -> PartyBlocks:
    """Split a party's local space into two-dimensional invariant blocks.

    ``eigenbasis`` optionally fixes the orthonormal eigenvectors of G inside
    range A(1|1) (columns, in coordinates of that range); it must diagonalize
    G. By default ``numpy.linalg.eigh`` chooses them.
    """
    if any(o.dimension for o in party_overlaps(m, party)):
        raise PreconditionError(
            f"party {party}: effect ranges overlap; run strip_shared_vectors first")
    p, q = m.effect(1, 1), m.effect(1, 2)
    u = range_basis(p)
    r = u.shape[1]
    if m.dim == 0 or 2 * r != m.dim:
        raise PreconditionError(
            f"party {party}: rank A(1|1) = {r} in dimension {m.dim}; need rank = dim/2")
    g = dagger(u) @ q @ u  # G restricted to range A(1|1)
    g = 0.5 * (g + dagger(g))
    if eigenbasis is None:
        cos2, y = np.linalg.eigh(g)
    else:
        y = np.asarray(eigenbasis, dtype=complex)
        cos2 = np.real(np.einsum("ik,ij,jk->k", y.conj(), g, y))
        if np.max(np.abs(g @ y - y * cos2)) > BLOCK_TOL:
            raise PreconditionError("supplied eigenbasis does not diagonalize G")
    if np.any(cos2 < DEGENERACY_TOL) or np.any(cos2 > 1 - DEGENERACY_TOL):
        raise PreconditionError(
            f"party {party}: G eigenvalue within {DEGENERACY_TOL:g} of 0 or 1; "
            "re-run strip_shared_vectors with a tighter threshold")

    blocks = []
    for k in range(r):
        v = u @ y[:, k]
        v /= np.linalg.norm(v)
        c = float(cos2[k])
        w = q @ v - c * v  # Gram-Schmidt of A(1|2) v against v; <w|A(1|2) v> = c(1-c) > 0
        w /= np.linalg.norm(w)
        frame = np.column_stack([v, w])
        effects = dagger(frame) @ m.effects @ frame
        blocks.append(JordanBlock(frame, float(np.arccos(np.sqrt(c))), effects))
    return PartyBlocks(party, tuple(blocks))


def block_index(kvec, rs) -> int:
    """Linearized index of a 1-based block vector, party 1 most significant."""
    idx = 0
    for k, r in zip(kvec, rs):
        idx = idx * r + (k - 1)
    return idx


@dataclass(frozen=True)
class BlockDecomposition:
    party_blocks: tuple
    weights: dict  # block vector (1-based tuple) -> weight
    qubit_states: dict  # block vector -> N-qubit density matrix (weights above cutoff only)

    def qubit_strategy(self, kvec) -> QuantumStrategy:
        ms = tuple(pb.blocks[k - 1].measurement() for pb, k in zip(self.party_blocks, kvec))
        return QuantumStrategy(self.qubit_states[kvec], ms)

    def retained(self) -> list[tuple]:
        return sorted(self.qubit_states, key=lambda k: block_index(k, [pb.r for pb in self.party_blocks]))

    def frames(self, kvec) -> list[np.ndarray]:
        return [pb.blocks[k - 1].frame for pb, k in zip(self.party_blocks, kvec)]

    def reconstruct_behavior(self) -> Behavior:
        keys = self.retained()
        return mix([born_behavior(self.qubit_strategy(k)) for k in keys],
                   [self.weights[k] for k in keys])


def compress(s: QuantumStrategy, eigenbases=None) -> BlockDecomposition:
    """Block weights and N-qubit block states of an overlap-free strategy."""
    s.validate()
    eigenbases = eigenbases or [None] * s.n_parties
    pbs = tuple(party_jordan_blocks(m, n + 1, eb)
                for n, (m, eb) in enumerate(zip(s.measurements, eigenbases)))
    us = [pb.unitary() for pb in pbs]
    rs = [pb.r for pb in pbs]
    rho = apply_product(s.state, s.local_dims, [dagger(u) for u in us])
    n = s.n_parties
    # local index (k, q): block k, qubit level q
    t = rho.reshape([x for r in rs for x in (r, 2)] * 2)
    weights, states = {}, {}
    for kvec in itertools.product(*(range(r) for r in rs)):
        sub = t[tuple(i for k in kvec for i in (k, slice(None))) * 2]
        block = sub.reshape(2 ** n, 2 ** n)
        w = float(np.real(np.trace(block)))
        key = tuple(k + 1 for k in kvec)
        weights[key] = max(w, 0.0)
        if w > WEIGHT_CUTOFF:
            states[key] = clean_state(block)
    if not states:
        raise InternalConsistencyError("every block weight is below the cutoff")
    return BlockDecomposition(pbs, weights, states)
