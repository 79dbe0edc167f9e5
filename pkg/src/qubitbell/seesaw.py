"""See-saw search for Bell violations over projective strategies.

Alternates an exact state update (lowest eigenvector of the Bell operator)
with exact per-party measurement updates (projector onto the lowest
eigenvectors of an effective local operator). Each update is optimal for its
block of variables, so the working value never increases. The result is a
local optimum only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError
from .linalg import contract_effects, dagger
from .quantum import LocalMeasurement, QuantumStrategy, random_projective_measurement
from .scenario import BellFunctional

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SeesawConfig:
    restarts: int = 20
    max_rounds: int = 200
    convergence_tol: float = 1e-10
    seed: int = 0
    local_dims: tuple | None = None  # None means qubits for every party
    rank: str = "balanced"  # "balanced": rank floor(d/2); "free": negative eigenspace

    def __post_init__(self):
        if self.restarts < 1 or self.max_rounds < 1 or not self.convergence_tol > 0:
            raise StructuralError("need restarts >= 1, max_rounds >= 1 and convergence_tol > 0")
        if self.rank not in ("balanced", "free"):
            raise StructuralError(f"unknown rank mode {self.rank!r}")


@dataclass(frozen=True)
class SeesawResult:
    best_value: float
    best_strategy: QuantumStrategy = field(repr=False)
    per_restart_values: list = field(default_factory=list)
    rounds_used: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    history: list = field(default_factory=list, repr=False)  # per restart, value after every step


def functional_tensor(f: BellFunctional) -> np.ndarray:
    """beta reshaped to (4,)*N with axis n indexed by 2*(x_n-1) + (a_n-1)."""
    n = f.n_parties
    t = f.coefficients.reshape((2,) * (2 * n))
    order = [ax for k in range(n) for ax in (k, n + k)]
    return np.transpose(t, order).reshape((4,) * n)


def bell_operator(f: BellFunctional, measurements) -> np.ndarray:
    """B = sum_{x,a} beta(a|x) A_1(a_1|x_1) x ... x A_N(a_N|x_N)."""
    measurements = list(measurements)
    n = f.n_parties
    if len(measurements) != n:
        raise StructuralError(f"functional has {n} parties, got {len(measurements)} measurements")
    beta = functional_tensor(f)
    dims = [m.dim for m in measurements]
    operands = [beta, list(range(n))]
    for p, m in enumerate(measurements):
        operands += [m.stacked(), [p, n + p, 2 * n + p]]
    out = list(range(n, 2 * n)) + list(range(2 * n, 3 * n))
    b = np.einsum(*operands, out, optimize="greedy")
    total = int(np.prod(dims))
    b = b.reshape(total, total)
    return 0.5 * (b + dagger(b))


def state_step(f: BellFunctional, measurements):
    """Optimal pure state for fixed measurements: lowest eigenvector of B."""
    w, v = np.linalg.eigh(bell_operator(f, measurements))
    psi = v[:, 0]
    return np.outer(psi, psi.conj()), float(w[0])


def effective_operators(f: BellFunctional, state: np.ndarray, measurements, party: int):
    """K_y with value = const + sum_y tr[A_party(1|y) K_y]."""
    measurements = list(measurements)
    dims = [m.dim for m in measurements]
    beta = np.moveaxis(functional_tensor(f), party, 0)
    r = contract_effects(state, dims, [m.stacked() for m in measurements], keep=party)
    rest = f.n_parties - 1
    out = []
    for y in (0, 1):
        delta = beta[2 * y] - beta[2 * y + 1]
        k = np.tensordot(delta, r, axes=rest)
        out.append(0.5 * (k + dagger(k)))
    return out


def measurement_step(f: BellFunctional, state: np.ndarray, measurements, party: int,
                     rank: str = "balanced") -> LocalMeasurement:
    """Optimal projective effects for one party with everything else fixed.

    Outcome-1 effects project onto the lowest eigenvectors of the effective
    operator: floor(d/2) of them in "balanced" mode (one on qubits), all
    negative ones in "free" mode. The previous effect is kept when it is
    already optimal, which makes converged points exact fixed points.
    """
    prev = measurements[party]
    d = prev.dim
    new_a1 = []
    for y, k in enumerate(effective_operators(f, state, measurements, party)):
        w, v = np.linalg.eigh(k)
        r = d // 2 if rank == "balanced" else int(np.sum(w < 0))
        cand = v[:, :r] @ dagger(v[:, :r])
        old = prev.effects[y, 0]
        if np.real(np.trace(old @ k)) <= np.real(np.trace(cand @ k)) + DEGENERATE_TOL:
            cand = old
        new_a1.append(cand)
    return LocalMeasurement.from_outcome_one(*new_a1)


def _run(f: BellFunctional, cfg: SeesawConfig, dims, rng):
    ms = [random_projective_measurement(d, rng) for d in dims]
    state, value = state_step(f, ms)
    history = [value]
    rounds, converged = 0, False
    for rounds in range(1, cfg.max_rounds + 1):
        for p in range(len(ms)):
            ms[p] = measurement_step(f, state, ms, p, cfg.rank)
            history.append(float(np.real(np.trace(state @ bell_operator(f, ms)))))
        state, new_value = state_step(f, ms)
        history.append(new_value)
        improvement = value - new_value
        value = new_value
        if improvement < cfg.convergence_tol:
            converged = True
            break
    return value, QuantumStrategy(state, tuple(ms)), rounds, converged, history


def seesaw(f: BellFunctional, cfg: SeesawConfig = SeesawConfig()) -> SeesawResult:
    """Minimize bell_value over states and projective measurements (local optimum)."""
    dims = tuple(cfg.local_dims) if cfg.local_dims is not None else (2,) * f.n_parties
    if len(dims) != f.n_parties:
        raise StructuralError(f"{len(dims)} local dims for {f.n_parties} parties")
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    runs = [_run(f, cfg, dims, np.random.default_rng(s)) for s in seeds]
    values = [r[0] for r in runs]
    best = int(np.argmin(values))
    return SeesawResult(
        best_value=values[best],
        best_strategy=runs[best][1],
        per_restart_values=values,
        rounds_used=[r[2] for r in runs],
        converged=[r[3] for r in runs],
        history=[r[4] for r in runs],
    )
