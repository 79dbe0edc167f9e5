"""Convex decomposition of dichotomic POVMs into projective measurements.

Both effects of a dichotomic POVM share an eigenbasis. Each eigenvector with
fractional eigenvalue ``lam`` of A(1) splits the measurement into two: one
that assigns the eigenvector to outcome 1 (weight ``lam``) and one that
assigns it to outcome 2 (weight ``1 - lam``). Branching over all fractional
eigenvectors gives a mixture of projective pairs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError, StructuralError, ValidationError
from .linalg import dagger, hermitian_residual, idempotence_residual
from .quantum import HERM_TOL, PSD_TOL, SUM_TOL, LocalMeasurement, QuantumStrategy

BRANCH_TOL = 1e-10
PRUNE_TOL = 1e-12
MAX_TERMS = 4096


@dataclass(frozen=True)
class ProjectiveMixture:
    """``measurements[j]`` has shape (2, d, d): the effects for outcomes 1 and 2."""

    weights: np.ndarray
    measurements: list = field(repr=False)

    def __len__(self):
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        return np.tensordot(self.weights, np.array(self.measurements), axes=1)


@dataclass(frozen=True)
class StrategyMixture:
    weights: np.ndarray
    strategies: list = field(repr=False)

    def __len__(self):
        return len(self.weights)


def _check_pair(pair: np.ndarray):
    if pair.ndim != 3 or pair.shape[0] != 2 or pair.shape[1] != pair.shape[2]:
        raise StructuralError(f"a dichotomic POVM has shape (2, d, d), got {pair.shape}")
    d = pair.shape[1]
    for a in (0, 1):
        if hermitian_residual(pair[a]) > HERM_TOL:
            raise ValidationError(f"effect {a + 1} is not Hermitian")
    if np.max(np.abs(pair[0] + pair[1] - np.eye(d)), initial=0.0) > SUM_TOL:
        raise ValidationError("effects do not sum to the identity")


def projectivize(pair) -> ProjectiveMixture:
    """Split a dichotomic POVM into a mixture of projective dichotomic POVMs.

    Term order: fractional eigenvalues in ascending order, the first one the
    most significant branch, outcome 1 before outcome 2.
    """
    pair = np.asarray(pair, dtype=complex)
    _check_pair(pair)
    d = pair.shape[1]
    lam, vecs = np.linalg.eigh(0.5 * (pair[0] + dagger(pair[0])))
    if d and (lam[0] < -PSD_TOL or lam[-1] > 1 + PSD_TOL):
        raise ValidationError(f"outcome-1 eigenvalues {lam[0]:.3g}..{lam[-1]:.3g} outside [0, 1]")
    lam = np.where(lam <= BRANCH_TOL, 0.0, lam)
    lam = np.where(lam >= 1 - BRANCH_TOL, 1.0, lam)

    fixed = lam == 1.0
    base = vecs[:, fixed] @ dagger(vecs[:, fixed])
    frac = np.flatnonzero((lam > 0) & (lam < 1))
    rank_one = [np.outer(vecs[:, i], vecs[:, i].conj()) for i in frac]

    weights, terms = [], []
    eye = np.eye(d)
    for choice in itertools.product((1, 2), repeat=len(frac)):
        w = 1.0
        a1 = base.copy()
        for k, c in enumerate(choice):
            if c == 1:
                w *= lam[frac[k]]
                a1 = a1 + rank_one[k]
            else:
                w *= 1 - lam[frac[k]]
        if w < PRUNE_TOL:
            continue
        weights.append(w)
        terms.append(np.array([a1, eye - a1]))
    weights = np.array(weights)
    return ProjectiveMixture(weights / weights.sum(), terms)


def is_projective_pair(pair, tol: float = 1e-8) -> bool:
    pair = np.asarray(pair)
    return (idempotence_residual(pair[0]) <= tol and idempotence_residual(pair[1]) <= tol
            and np.max(np.abs(pair[0] @ pair[1]), initial=0.0) <= tol)


def projectivize_strategy(s: QuantumStrategy, max_terms: int = MAX_TERMS) -> StrategyMixture:
    """Product mixture of all-projective strategies sharing the input state."""
    s.validate()
    per_povm = []  # flattened over (party, setting)
    count = 1
    for m in s.measurements:
        for x in (0, 1):
            mix = projectivize(m.effects[x])
            per_povm.append(mix)
            count *= len(mix)
    if count > max_terms:
        raise ResourceError(f"projective mixture would have {count} terms (limit {max_terms})")

    weights, strategies = [], []
    for picks in itertools.product(*(range(len(p)) for p in per_povm)):
        w = 1.0
        ms = []
        for n in range(s.n_parties):
            j1, j2 = picks[2 * n], picks[2 * n + 1]
            p1, p2 = per_povm[2 * n], per_povm[2 * n + 1]
            w *= p1.weights[j1] * p2.weights[j2]
            ms.append(LocalMeasurement(np.array([p1.measurements[j1], p2.measurements[j2]])))
        weights.append(w)
        strategies.append(QuantumStrategy(s.state, tuple(ms)))
    return StrategyMixture(np.array(weights), strategies)
