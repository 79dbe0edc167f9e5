"""Full decomposition chain and the local rank-two filter.

``decompose`` runs projectivization, stripping and block compression and
keeps every component with its absolute weight. The behavior of the input is
exactly the weighted sum of the component behaviors, so some component does
at least as well as the input on any Bell functional. ``slocc_filter`` picks
the best qubit block and returns the local rank-two projectors that carve it
out of the original state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compression import BlockDecomposition, compress
from .errors import FactorizableComponentError, InternalConsistencyError, PreconditionError
from .linalg import apply_product, dagger, kron_all, projector_onto
from .projectivize import StrategyMixture, projectivize_strategy
from .quantum import QuantumStrategy, born_behavior
from .reduction import StripResult, strip_shared_vectors
from .scenario import Behavior, BellFunctional, bell_value, mix

TIE_TOL = 1e-12


@dataclass(frozen=True)
class Component:
    kind: str  # "factor" or "block"
    weight: float  # absolute weight in the input behavior
    strategy: QuantumStrategy = field(repr=False)
    term: int  # index into the projective mixture
    step: int | None = None  # reduction step, for factor components
    block: tuple | None = None  # 1-based block vector, for block components
    frames: tuple | None = field(default=None, repr=False)  # per party, d_n x 2, original coordinates

    def behavior(self) -> Behavior:
        return born_behavior(self.strategy)


@dataclass(frozen=True)
class Decomposition:
    strategy: QuantumStrategy = field(repr=False)
    mixture: StrategyMixture = field(repr=False)
    strips: tuple = field(repr=False)
    compressions: tuple = field(repr=False)
    components: tuple = field(repr=False)

    def reconstruct_behavior(self) -> Behavior:
        return mix([c.behavior() for c in self.components], [c.weight for c in self.components])

    def reconstruction_residual(self, target: Behavior | None = None) -> float:
        target = born_behavior(self.strategy) if target is None else target
        return float(np.max(np.abs(self.reconstruct_behavior().table - target.table)))

    def block_components(self) -> list[Component]:
        return [c for c in self.components if c.kind == "block"]


def decompose(s: QuantumStrategy) -> Decomposition:
    """Projectivize, strip and compress; collect all weighted components."""
    mixture = projectivize_strategy(s)
    strips, comps, components = [], [], []
    for t, (tw, ts) in enumerate(zip(mixture.weights, mixture.strategies)):
        st: StripResult = strip_shared_vectors(ts)
        strips.append(st)
        for j, step in enumerate(st.steps):
            if step.factor_strategy is not None:
                components.append(Component("factor", tw * step.absolute_weight,
                                            step.factor_strategy, t, step=j))
        if st.reduced is None:
            comps.append(None)
            continue
        bd: BlockDecomposition = compress(st.reduced)
        comps.append(bd)
        for kvec in bd.retained():
            frames = tuple(iso @ f for iso, f in zip(st.isometries, bd.frames(kvec)))
            components.append(Component("block", tw * st.residual_weight * bd.weights[kvec],
                                        bd.qubit_strategy(kvec), t, block=kvec, frames=frames))
    return Decomposition(s, mixture, tuple(strips), tuple(comps), tuple(components))


@dataclass(frozen=True)
class SloccFilter:
    projectors: tuple = field(repr=False)  # rank-2 projectors X_n on the original local spaces
    frames: tuple = field(repr=False)  # d_n x 2 isometries with X_n = F F^dagger
    success_probability: float = 0.0
    filtered_state: np.ndarray = field(default=None, repr=False)  # N-qubit state in the frames
    filtered_strategy: QuantumStrategy = field(default=None, repr=False)
    bell_values: dict = field(default_factory=dict)  # {"original": ..., "filtered": ...}
    term: int = 0
    block: tuple = ()

    def embedded_state(self) -> np.ndarray:
        """The filtered state on the original space."""
        return apply_product(self.filtered_state, [2] * len(self.frames), self.frames)


def filtered_state(rho: np.ndarray, projectors) -> np.ndarray:
    """X rho X / tr[rho X] with X the tensor product of local projectors."""
    x = kron_all(projectors)
    out = x @ rho @ x
    return out / np.real(np.trace(out))


def slocc_filter(s: QuantumStrategy, f: BellFunctional) -> SloccFilter:
    """Local rank-two projections onto the qubit block with the largest violation."""
    original = bell_value(f, born_behavior(s))
    if original >= 0:
        raise PreconditionError(f"strategy does not violate the functional (value {original:.6g})")
    dec = decompose(s)
    table = [{"kind": c.kind, "term": c.term, "step": c.step, "block": c.block,
              "weight": c.weight, "value": bell_value(f, c.behavior())} for c in dec.components]
    blocks = [(row, c) for row, c in zip(table, dec.components) if c.kind == "block"]
    if not blocks:
        raise FactorizableComponentError(
            "the decomposition has no qubit blocks; the violation sits in factorizable terms", table)
    best_val = min(row["value"] for row, _ in blocks)
    row, comp = next((row, c) for row, c in blocks if row["value"] <= best_val + TIE_TOL)
    if best_val > original + 1e-9:
        best_any = min(table, key=lambda r: r["value"])
        if best_any["kind"] == "factor" and best_any["value"] <= original + 1e-9:
            raise FactorizableComponentError(
                "the strongest violating component is a factorizable term, not a qubit block", table)
        raise InternalConsistencyError(
            "no component attains the mixture's violation; convexity is broken", table)

    frames = comp.frames
    projectors = tuple(projector_onto(fr) for fr in frames)
    success = float(np.real(np.trace(apply_product(s.state, s.local_dims,
                                                   [dagger(fr) for fr in frames]))))
    return SloccFilter(
        projectors=projectors,
        frames=frames,
        success_probability=success,
        filtered_state=comp.strategy.state,
        filtered_strategy=comp.strategy,
        bell_values={"original": original, "filtered": row["value"]},
        term=comp.term,
        block=comp.block,
    )
