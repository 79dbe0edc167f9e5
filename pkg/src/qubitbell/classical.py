"""Membership in the local (classical) polytope and classical bounds."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import simplex
from .errors import LPError, ResourceError
from .scenario import (
    Behavior,
    BellFunctional,
    Scenario,
    bell_value,
    deterministic_behavior,
    label_vectors,
    require_valid,
    vector_index,
)

MAX_PARTIES = 8
LOCAL_STRATEGIES = [(1, 1), (1, 2), (2, 1), (2, 2)]


def _guard(n: int):
    if n > MAX_PARTIES:
        raise ResourceError(
            f"N={n} exceeds the vertex-enumeration guard N <= {MAX_PARTIES}; "
            "use a streaming (column-generation) membership test instead")


@dataclass(frozen=True)
class VertexSet:
    scenario: Scenario
    strategies: tuple = field(repr=False)

    def __len__(self):
        return len(self.strategies)

    @cached_property
    def outcome_index(self) -> np.ndarray:
        """``[vertex, index(x)] -> index(a)`` of the deterministic outcome."""
        n = self.scenario.n_parties
        xs = label_vectors(n)
        out = np.empty((len(self.strategies), len(xs)), dtype=np.int64)
        for lam, strat in enumerate(self.strategies):
            for xi, x in enumerate(xs):
                out[lam, xi] = vector_index([strat[k][x[k] - 1] for k in range(n)])
        return out

    @cached_property
    def matrix(self) -> np.ndarray:
        """Column ``lam`` is the flattened table of vertex ``lam``."""
        m = self.scenario.n_vectors
        cols = np.zeros((m * m, len(self.strategies)))
        rows = np.arange(m) * m + self.outcome_index
        cols[rows, np.arange(len(self.strategies))[:, None]] = 1.0
        return cols

    def behavior(self, lam: int) -> Behavior:
        return deterministic_behavior(self.scenario, self.strategies[lam])

    def behaviors(self) -> list[Behavior]:
        return [self.behavior(lam) for lam in range(len(self))]

    def values(self, f: BellFunctional) -> np.ndarray:
        """bell_value(f, v) for every vertex, without building the tables."""
        m = self.scenario.n_vectors
        return f.coefficients[np.arange(m), self.outcome_index].sum(axis=1)


def enumerate_vertices(s: Scenario) -> VertexSet:
    """All 4^N deterministic behaviors, party 1 most significant."""
    _guard(s.n_parties)
    return VertexSet(s, tuple(itertools.product(LOCAL_STRATEGIES, repeat=s.n_parties)))


@dataclass(frozen=True)
class LpCertificate:
    kind: str  # "member" | "non_member"
    slack: float
    weights: dict | None = None
    separating_functional: BellFunctional | None = None

    @property
    def is_member(self) -> bool:
        return self.kind == "member"


RECONSTRUCTION_TOL = 1e-8


def is_classical(b: Behavior, feas_tol: float = simplex.FEAS_TOL) -> LpCertificate:
    """Decide whether ``b`` is a mixture of deterministic behaviors.

    Returns the mixture weights, or a functional that is nonnegative on every
    vertex and negative on ``b``.
    """
    require_valid(b)
    verts = enumerate_vertices(b.scenario)
    V = verts.matrix
    A = np.vstack([V, np.ones((1, V.shape[1]))])
    rhs = np.concatenate([b.flat(), [1.0]])
    res = simplex.phase1(A, rhs, feas_tol=feas_tol)

    if res.feasible:
        w = np.clip(res.x, 0.0, None)
        residual = float(np.max(np.abs(V @ w - b.flat())))
        if abs(w.sum() - 1) > 1e-9 or residual > RECONSTRUCTION_TOL:
            raise LPError("member weights do not reconstruct the behavior", residual=residual)
        weights = {int(i): float(w[i]) for i in np.flatnonzero(w > 0)}
        return LpCertificate("member", res.objective, weights=weights)

    m = b.scenario.n_vectors
    y_table, y_norm = res.duals[:-1], res.duals[-1]
    coeffs = -(y_table + y_norm / m).reshape(m, m)
    functional = BellFunctional(b.scenario, coeffs)
    vals = verts.values(functional)
    low = float(vals.min())
    if low < -1e-9:
        raise LPError("dual functional is negative on a vertex", residual=low)
    if low < 0:
        functional = functional.shifted(-low)
    query = bell_value(functional, b)
    if query >= -1e-9:
        raise LPError("dual functional does not separate the behavior", residual=query)
    return LpCertificate("non_member", res.objective, separating_functional=functional)


def classical_bound_with_vertex(f: BellFunctional) -> tuple[float, int]:
    """Minimum over deterministic vertices and the lowest-index minimizer."""
    _guard(f.n_parties)
    vals = enumerate_vertices(f.scenario).values(f)
    lam = int(np.argmin(vals))
    return float(vals[lam]), lam


def classical_bound(f: BellFunctional) -> float:
    return classical_bound_with_vertex(f)[0]


def classical_bound_shift(f: BellFunctional) -> BellFunctional:
    """Shift ``f`` so that its classical minimum is exactly zero."""
    return f.shifted(-classical_bound(f))
