"""Stripping of vectors shared between effect ranges of different settings.

If a local vector lies in range A(a|1) and in range A(a'|2), every effect of
that party commutes with its projector, so the behavior splits exactly into a
term where that party answers deterministically (a for setting 1, a' for
setting 2) and a term on the orthogonal complement. Repeating until no shared
vectors remain leaves a strategy in which each local space has even
dimension and all four effects have rank dim/2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .linalg import apply_local, clean_state, dagger, orthogonal_complement, projector_rank
from .quantum import LocalMeasurement, QuantumStrategy, born_behavior, check_projective
from .scenario import Behavior, mix

log = logging.getLogger(__name__)

OVERLAP_TOL = 1e-8
WITNESS_TOL = 1e-7
WEIGHT_CUTOFF = 1e-12
# (a, x) pairs with different settings, in removal order
PAIR_ORDER = (((1, 1), (1, 2)), ((1, 1), (2, 2)), ((2, 1), (1, 2)), ((2, 1), (2, 2)))


@dataclass(frozen=True)
class PairOverlap:
    party: int  # 1-based
    first: tuple  # (a, x)
    second: tuple  # (a', x')
    dimension: int
    witness: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class RangeOverlapReport:
    entries: tuple

    @property
    def total(self) -> int:
        return sum(e.dimension for e in self.entries)

    def for_party(self, party: int) -> list[PairOverlap]:
        return [e for e in self.entries if e.party == party]

    def dimension(self, party: int, first, second) -> int:
        for e in self.entries:
            if e.party == party and e.first == tuple(first) and e.second == tuple(second):
                return e.dimension
        raise KeyError((party, first, second))


def _require_projective(s: QuantumStrategy):
    flags = check_projective(s)
    if not flags.all:
        bad = [tuple(int(i) + 1 for i in idx) for idx in np.argwhere(~flags.flags)]
        raise PreconditionError(
            f"non-projective effects (party, x, a) {bad}; run projectivize_strategy first")


def pair_overlap(p: np.ndarray, q: np.ndarray, threshold: float = OVERLAP_TOL):
    """Dimension of range(p) & range(q) and a unit witness when nonzero."""
    if p.shape[0] == 0:
        return 0, None
    _, sv, vh = np.linalg.svd(p @ q)
    dim = int(np.sum(sv >= 1 - threshold))
    return dim, (vh[0].conj() if dim else None)


def party_overlaps(m: LocalMeasurement, party: int = 1, threshold: float = OVERLAP_TOL):
    out = []
    for first, second in PAIR_ORDER:
        dim, w = pair_overlap(m.effect(*first), m.effect(*second), threshold)
        out.append(PairOverlap(party, first, second, dim, w))
    return out


def range_overlaps(s: QuantumStrategy, threshold: float = OVERLAP_TOL) -> RangeOverlapReport:
    """Cross-setting range intersections for every party.

    Same-setting pairs are skipped: orthogonal projectors share no vector.
    """
    _require_projective(s)
    entries = []
    for n, m in enumerate(s.measurements):
        entries += party_overlaps(m, n + 1, threshold)
    return RangeOverlapReport(tuple(entries))


def _deterministic_measurement(assignment) -> LocalMeasurement:
    eff = np.zeros((2, 2, 1, 1))
    for x, a in enumerate(assignment):
        eff[x, a - 1] = 1.0
    return LocalMeasurement(eff)


@dataclass(frozen=True)
class ReductionStep:
    party: int  # 1-based
    pair: tuple
    removed_vector: np.ndarray = field(repr=False)  # in the party's original coordinates
    factor_weight: float = 0.0  # pi, relative to the pre-step strategy
    absolute_weight: float = 0.0  # weight of the factor term in the input behavior
    assignment: tuple = ()  # deterministic outcome for settings 1 and 2
    factor_strategy: QuantumStrategy | None = field(default=None, repr=False)
    reduced_strategy: QuantumStrategy | None = field(default=None, repr=False)
    local_dim_after: int = 0

    def factor_behavior(self) -> Behavior | None:
        if self.factor_strategy is None:
            return None
        return born_behavior(self.factor_strategy)


@dataclass(frozen=True)
class StripResult:
    reduced: QuantumStrategy | None
    steps: tuple
    residual_weight: float
    isometries: tuple = field(repr=False)  # party -> (original dim, reduced dim)
    factorized_party: int | None = None

    @property
    def fully_factorized(self) -> bool:
        return self.reduced is None

    def components(self):
        """(absolute weight, strategy) for every factor term and the remainder."""
        out = [(st.absolute_weight, st.factor_strategy) for st in self.steps
               if st.factor_strategy is not None]
        if self.reduced is not None:
            out.append((self.residual_weight, self.reduced))
        return out

    def reconstruct_behavior(self) -> Behavior:
        comps = self.components()
        return mix([born_behavior(s) for _, s in comps], [w for w, _ in comps])


def strip_shared_vectors(s: QuantumStrategy, threshold: float = OVERLAP_TOL) -> StripResult:
    """Remove shared vectors party by party until no cross-setting overlaps remain."""
    s.validate()
    _require_projective(s)
    cur = s
    isos = [np.eye(d, dtype=complex) for d in s.local_dims]
    carried = 1.0
    steps = []
    for n in range(s.n_parties):
        while True:
            hit = next((o for o in party_overlaps(cur.measurements[n], n + 1, threshold)
                        if o.dimension), None)
            if hit is None:
                break
            v = hit.witness
            dims = cur.local_dims
            assignment = (hit.first[0], hit.second[0])
            on_v = apply_local(cur.state, dims, n, v.conj()[None, :])
            pi = float(np.clip(np.real(np.trace(on_v)), 0.0, 1.0))

            factor = None
            if pi > WEIGHT_CUTOFF:
                ms = list(cur.measurements)
                ms[n] = _deterministic_measurement(assignment)
                factor = QuantumStrategy(clean_state(on_v), tuple(ms))

            original_v = isos[n] @ v
            if 1 - pi <= WEIGHT_CUTOFF or dims[n] == 1:
                steps.append(ReductionStep(
                    n + 1, (hit.first, hit.second), original_v, pi, carried * pi, assignment,
                    factor, None, dims[n] - 1))
                return StripResult(None, tuple(steps), 0.0, tuple(isos), factorized_party=n + 1)

            w = orthogonal_complement(v)
            rho = apply_local(cur.state, dims, n, dagger(w)) / (1 - pi)
            ms = list(cur.measurements)
            ms[n] = LocalMeasurement(dagger(w) @ ms[n].effects @ w)
            cur = QuantumStrategy(clean_state(rho), tuple(ms))
            isos[n] = isos[n] @ w
            steps.append(ReductionStep(
                n + 1, (hit.first, hit.second), original_v, pi, carried * pi, assignment,
                factor, cur, dims[n] - 1))
            carried *= 1 - pi
    return StripResult(cur, tuple(steps), carried, tuple(isos))


@dataclass(frozen=True)
class RankReport:
    party: int
    dim: int
    ranks: dict  # (a, x) -> rank
    balanced: bool


def check_rank_balance(s: QuantumStrategy) -> list[RankReport]:
    """Local dimension and effect ranks per party; balanced means all ranks are dim/2.

    On a strategy without cross-setting overlaps every party must be
    balanced, so an unbalanced party is logged as an upstream error.
    """
    report = range_overlaps(s)
    if report.total:
        raise PreconditionError(
            "range overlaps present; run strip_shared_vectors before checking rank balance")
    out = []
    for n, m in enumerate(s.measurements):
        ranks = {(a, x): projector_rank(m.effect(a, x)) for x in (1, 2) for a in (1, 2)}
        balanced = m.dim % 2 == 0 and all(r == m.dim // 2 for r in ranks.values())
        out.append(RankReport(n + 1, m.dim, ranks, balanced))
    bad = [r.party for r in out if not r.balanced]
    if bad:
        log.error("overlap-free strategy has unbalanced parties %s; ranks must all equal dim/2 "
                  "(upstream stripping bug or near-threshold overlaps)", bad)
    return out
