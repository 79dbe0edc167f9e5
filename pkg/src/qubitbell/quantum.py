"""Density matrices, dichotomic POVMs and the Born-rule behavior."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError, StructuralError, ValidationError
from .linalg import (
    apply_product,
    contract_effects,
    dagger,
    hermitian_residual,
    idempotence_residual,
    kron_all,
    min_eigenvalue,
    random_mixed_state,
    random_pure_state,
    random_unitary,
)
from .scenario import Behavior, Scenario, label_vectors, require_valid

HERM_TOL = 1e-10
PSD_TOL = 1e-9
SUM_TOL = 1e-9
TRACE_TOL = 1e-9
PROJ_TOL = 1e-8
MAX_TOTAL_DIM = 1024
KRON_MAX_DIM = 64


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LocalMeasurement:
    """``effects[x-1, a-1]`` is the effect A(a|x), a ``dim x dim`` matrix."""

    effects: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = _freeze(self.effects)
        if e.ndim != 4 or e.shape[:2] != (2, 2) or e.shape[2] != e.shape[3]:
            raise StructuralError(f"effects must have shape (2, 2, d, d), got {e.shape}")
        object.__setattr__(self, "effects", e)

    @classmethod
    def from_outcome_one(cls, a1_setting1, a1_setting2) -> "LocalMeasurement":
        """Build from the outcome-1 effects; outcome 2 is the complement."""
        a1 = np.asarray(a1_setting1, dtype=complex)
        a2 = np.asarray(a1_setting2, dtype=complex)
        eye = np.eye(a1.shape[0])
        return cls(np.array([[a1, eye - a1], [a2, eye - a2]]))

    @property
    def dim(self) -> int:
        return self.effects.shape[2]

    def effect(self, a: int, x: int) -> np.ndarray:
        return self.effects[x - 1, a - 1]

    def stacked(self) -> np.ndarray:
        """Shape (4, d, d) indexed by 2*(x-1) + (a-1)."""
        return self.effects.reshape(4, self.dim, self.dim)

    def problems(self) -> list[str]:
        out = []
        eye = np.eye(self.dim)
        for x in (1, 2):
            for a in (1, 2):
                e = self.effect(a, x)
                if hermitian_residual(e) > HERM_TOL:
                    out.append(f"A({a}|{x}) is not Hermitian")
                elif min_eigenvalue(e) < -PSD_TOL:
                    out.append(f"A({a}|{x}) is not positive semidefinite")
            if self.dim and np.max(np.abs(self.effect(1, x) + self.effect(2, x) - eye)) > SUM_TOL:
                out.append(f"A(1|{x}) + A(2|{x}) != identity")
        return out

    def conjugated(self, u: np.ndarray) -> "LocalMeasurement":
        """U A U^dagger for every effect."""
        return LocalMeasurement(u @ self.effects @ dagger(u))


@dataclass(frozen=True)
class QuantumStrategy:
    state: np.ndarray = field(repr=False)
    measurements: tuple

    def __post_init__(self):
        ms = tuple(self.measurements)
        if not ms:
            raise StructuralError("a strategy needs at least one party")
        if not all(isinstance(m, LocalMeasurement) for m in ms):
            raise StructuralError("measurements must be LocalMeasurement instances")
        rho = _freeze(self.state)
        total = int(np.prod([m.dim for m in ms]))
        if rho.shape != (total, total):
            raise StructuralError(
                f"state has shape {rho.shape}, local dims {[m.dim for m in ms]} need ({total}, {total})")
        if total > MAX_TOTAL_DIM:
            raise ResourceError(f"total dimension {total} exceeds guard {MAX_TOTAL_DIM}")
        object.__setattr__(self, "state", rho)
        object.__setattr__(self, "measurements", ms)

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(m.dim for m in self.measurements)

    @property
    def n_parties(self) -> int:
        return len(self.measurements)

    @property
    def scenario(self) -> Scenario:
        return Scenario(self.n_parties)

    def problems(self) -> list[str]:
        out = []
        rho = self.state
        if hermitian_residual(rho) > HERM_TOL:
            out.append("state is not Hermitian")
        elif min_eigenvalue(rho) < -PSD_TOL:
            out.append("state is not positive semidefinite")
        if abs(np.trace(rho) - 1) > TRACE_TOL:
            out.append(f"state trace is {np.real(np.trace(rho)):.12g}, not 1")
        for n, m in enumerate(self.measurements):
            out += [f"party {n + 1}: {p}" for p in m.problems()]
        return out

    def validate(self) -> "QuantumStrategy":
        probs = self.problems()
        if probs:
            raise ValidationError("invalid strategy: " + "; ".join(probs))
        return self

    def with_state(self, state) -> "QuantumStrategy":
        return QuantumStrategy(state, self.measurements)

    def conjugated(self, unitaries) -> "QuantumStrategy":
        """Apply local unitaries to the state and to every effect."""
        rho = apply_product(self.state, self.local_dims, unitaries)
        ms = tuple(m.conjugated(u) for m, u in zip(self.measurements, unitaries))
        return QuantumStrategy(rho, ms)


def _table_from_tensor(t: np.ndarray, n: int) -> np.ndarray:
    # axes j_n = (x_n, a_n) -> (x_1..x_N, a_1..a_N)
    t = t.reshape((2, 2) * n)
    t = np.transpose(t, list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
    return np.real(t).reshape(2 ** n, 2 ** n)


def born_tensor(s: QuantumStrategy) -> np.ndarray:
    return contract_effects(s.state, s.local_dims, [m.stacked() for m in s.measurements])


def born_behavior(s: QuantumStrategy, method: str = "auto", validate: bool = True) -> Behavior:
    """P(a|x) = tr[rho (A_1(a_1|x_1) x ... x A_N(a_N|x_N))].

    ``method`` is "contract" (iterated contraction), "kron" (explicit tensor
    products, only for small spaces; kept as a cross-check) or "auto" (contract).
    """
    if validate:
        s.validate()
    n = s.n_parties
    total = int(np.prod(s.local_dims))
    if method == "auto":
        method = "contract"
    if method == "contract":
        table = _table_from_tensor(born_tensor(s), n)
    elif method == "kron":
        if total > KRON_MAX_DIM:
            raise ResourceError(f"kron evaluation limited to dimension {KRON_MAX_DIM}")
        table = np.empty((2 ** n, 2 ** n))
        vecs = label_vectors(n)
        for xi, x in enumerate(vecs):
            for ai, a in enumerate(vecs):
                op = kron_all(m.effect(a[k], x[k]) for k, m in enumerate(s.measurements))
                table[xi, ai] = np.real(np.sum(s.state * op.T))
    else:
        raise ValueError(f"unknown method {method!r}")
    b = Behavior(s.scenario, table)
    if validate:
        require_valid(b)
    return b


@dataclass(frozen=True)
class ProjectiveFlag:
    """``flags[n, x-1, a-1]`` is True iff A_n(a|x) is idempotent within 1e-8."""

    flags: np.ndarray
    residuals: np.ndarray

    @property
    def all(self) -> bool:
        return bool(np.all(self.flags))


def check_projective(s: QuantumStrategy) -> ProjectiveFlag:
    res = np.array([[[idempotence_residual(m.effect(a, x)) for a in (1, 2)] for x in (1, 2)]
                    for m in s.measurements])
    return ProjectiveFlag(res <= PROJ_TOL, res)


def is_projective(s: QuantumStrategy) -> bool:
    return check_projective(s).all


def random_projective_measurement(d: int, rng: np.random.Generator, ranks=None) -> LocalMeasurement:
    """Random projector pairs; ``ranks`` gives rank A(1|x) per setting (default d//2)."""
    ranks = (d // 2, d // 2) if ranks is None else ranks
    a1 = []
    for r in ranks:
        u = random_unitary(d, rng)
        a1.append(u[:, :r] @ dagger(u[:, :r]))
    return LocalMeasurement.from_outcome_one(*a1)


def random_povm_measurement(d: int, rng: np.random.Generator) -> LocalMeasurement:
    a1 = []
    for _ in range(2):
        u = random_unitary(d, rng)
        a1.append(u @ np.diag(rng.random(d)) @ dagger(u))
    return LocalMeasurement.from_outcome_one(*a1)


def random_strategy(dims, pure: bool = True, projective: bool = True, seed: int = 0) -> QuantumStrategy:
    """Seeded random strategy; projectors have rank floor(d/2)."""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise StructuralError(f"local dimensions must be positive, got {dims}")
    rng = np.random.default_rng(seed)
    total = int(np.prod(dims))
    rho = random_pure_state(total, rng) if pure else random_mixed_state(total, rng)
    make = random_projective_measurement if projective else random_povm_measurement
    return QuantumStrategy(rho, tuple(make(d, rng) for d in dims))


def embed_strategy(s: QuantumStrategy, dims, seed: int = 0, noise: float = 0.0) -> QuantumStrategy:
    """Embed ``s`` into larger local spaces through random isometries.

    On each local complement the effects are a random projective pair, so the
    embedded strategy is still projective. With ``noise > 0`` the state is mixed
    with a random full-rank state on the whole space.
    """
    rng = np.random.default_rng(seed)
    rho = s.state
    isos, ms = [], []
    for m, d in zip(s.measurements, dims):
        if d < m.dim:
            raise StructuralError(f"cannot embed dimension {m.dim} into {d}")
        u = random_unitary(d, rng)
        v, comp = u[:, :m.dim], u[:, m.dim:]
        c = d - m.dim
        cm = random_projective_measurement(
            c, rng, ranks=[c // 2 + (int(rng.integers(0, 2)) if c % 2 else 0) for _ in range(2)])
        eff = v @ m.effects @ dagger(v) + comp @ cm.effects @ dagger(comp)
        isos.append(v)
        ms.append(LocalMeasurement(eff))
    rho = apply_product(rho, s.local_dims, isos)
    if noise:
        rho = (1 - noise) * rho + noise * random_mixed_state(rho.shape[0], rng)
    return QuantumStrategy(rho, tuple(ms))


def qubit_observable_measurement(angles) -> LocalMeasurement:
    """Qubit projectors for observables cos(t) Z + sin(t) X, one angle per setting.

    Outcome 2 is the +1 eigenspace and outcome 1 the -1 eigenspace, matching
    the spin convention of the scenario module.
    """
    z = np.diag([1.0, -1.0])
    xm = np.array([[0.0, 1.0], [1.0, 0.0]])
    a1 = [(np.eye(2) - (np.cos(t) * z + np.sin(t) * xm)) / 2 for t in angles]
    return LocalMeasurement.from_outcome_one(*a1)


def singlet_state() -> np.ndarray:
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return np.outer(psi, psi.conj())
