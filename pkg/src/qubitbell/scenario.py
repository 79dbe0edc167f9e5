"""Scenario, behaviors, full correlators and Bell functionals for N parties,
two settings and two outcomes per party.

Settings and outcomes take values in {1, 2}. A vector ``v`` of such labels is
linearized with party 1 as the most significant binary digit,
``index(v) = sum_n (v_n - 1) * 2**(N - n)``. Tables are stored as arrays of
shape ``(2**N, 2**N)`` indexed by ``[index(x), index(a)]``; flattening that
array row-major gives the on-disk layout ``index(x) * 2**N + index(a)``.

Outcome ``a`` carries the spin value ``(-1)**a`` (so 1 -> -1 and 2 -> +1),
which fixes the sign of every full correlator.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError, ValidationError

PROB_TOL = 1e-12
NORM_TOL = 1e-9
CORR_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    n_parties: int
    settings_per_party: int = 2
    outcomes_per_setting: int = 2

    def __post_init__(self):
        if not isinstance(self.n_parties, (int, np.integer)) or self.n_parties < 1:
            raise StructuralError(f"n_parties must be a positive integer, got {self.n_parties!r}")
        if self.settings_per_party != 2 or self.outcomes_per_setting != 2:
            raise StructuralError("only two settings with two outcomes each are supported")

    @property
    def n_vectors(self) -> int:
        """Number of settings vectors (equal to the number of outcome vectors)."""
        return 2 ** self.n_parties

    def vectors(self):
        return label_vectors(self.n_parties)


def label_vectors(n: int) -> list[tuple[int, ...]]:
    """All vectors in {1,2}^n, in linearized index order."""
    return list(itertools.product((1, 2), repeat=n))


def vector_index(v) -> int:
    n = len(v)
    idx = 0
    for k, value in enumerate(v):
        if value not in (1, 2):
            raise StructuralError(f"label {value!r} not in {{1, 2}}")
        idx += (value - 1) << (n - 1 - k)
    return idx


def spin_signs(n: int) -> np.ndarray:
    """prod_n (-1)**a_n for every outcome vector, in index order."""
    return np.array([(-1) ** sum(a) for a in label_vectors(n)], dtype=float)


def _as_table(n: int, values, name: str) -> np.ndarray:
    size = 2 ** n
    arr = np.asarray(values, dtype=float)
    if arr.shape == (size * size,):
        arr = arr.reshape(size, size)
    if arr.shape != (size, size):
        raise StructuralError(
            f"{name} table for N={n} needs {size * size} entries, got shape {arr.shape}")
    bad = np.argwhere(~np.isfinite(arr))
    if len(bad):
        xi, ai = bad[0]
        vecs = label_vectors(n)
        raise StructuralError(f"{name} entry missing or non-finite at x={vecs[xi]}, a={vecs[ai]}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Behavior:
    """Conditional probability table P(a|x)."""

    scenario: Scenario
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "table", _as_table(self.scenario.n_parties, self.table, "behavior"))

    @classmethod
    def from_flat(cls, n_parties: int, probabilities) -> "Behavior":
        return cls(Scenario(n_parties), probabilities)

    @property
    def n_parties(self) -> int:
        return self.scenario.n_parties

    def prob(self, a, x) -> float:
        return float(self.table[vector_index(x), vector_index(a)])

    def flat(self) -> np.ndarray:
        return self.table.reshape(-1)


@dataclass(frozen=True)
class FullCorrelation:
    scenario: Scenario
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).copy()
        if vals.shape != (self.scenario.n_vectors,):
            raise StructuralError(f"expected {self.scenario.n_vectors} correlators, got {vals.shape}")
        if np.any(np.abs(vals) > 1 + CORR_TOL):
            raise ValidationError("full correlators must lie in [-1, 1]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, x) -> float:
        return float(self.values[vector_index(x)])


@dataclass(frozen=True)
class BellFunctional:
    """Coefficients beta(a|x); classical behaviors satisfy sum beta*P >= 0."""

    scenario: Scenario
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _as_table(self.scenario.n_parties, self.coefficients, "functional"))

    @classmethod
    def from_flat(cls, n_parties: int, coefficients) -> "BellFunctional":
        return cls(Scenario(n_parties), coefficients)

    @property
    def n_parties(self) -> int:
        return self.scenario.n_parties

    def flat(self) -> np.ndarray:
        return self.coefficients.reshape(-1)

    def __add__(self, other: "BellFunctional") -> "BellFunctional":
        _same_scenario(self.scenario, other.scenario)
        return BellFunctional(self.scenario, self.coefficients + other.coefficients)

    def __neg__(self) -> "BellFunctional":
        return BellFunctional(self.scenario, -self.coefficients)

    def __mul__(self, c: float) -> "BellFunctional":
        return BellFunctional(self.scenario, c * self.coefficients)

    __rmul__ = __mul__

    def shifted(self, constant: float) -> "BellFunctional":
        """Add ``constant`` to the value on every normalized behavior."""
        n = self.scenario.n_vectors
        return BellFunctional(self.scenario, self.coefficients + constant / n)


@dataclass(frozen=True)
class Violation:
    kind: str  # "range" or "normalization"
    x: tuple
    a: tuple | None
    residual: float

    def __str__(self):
        where = f"x={self.x}" + (f", a={self.a}" if self.a is not None else "")
        return f"{self.kind} violation at {where}: residual {self.residual:.3e}"


def _same_scenario(s1: Scenario, s2: Scenario):
    if s1 != s2:
        raise StructuralError(f"scenario mismatch: N={s1.n_parties} vs N={s2.n_parties}")


def validate_behavior(b: Behavior) -> list[Violation]:
    """Range and per-setting normalization violations (empty list when valid)."""
    vecs = b.scenario.vectors()
    report = []
    t = b.table
    for xi, ai in np.argwhere((t < -PROB_TOL) | (t > 1 + PROB_TOL)):
        v = t[xi, ai]
        residual = -v if v < 0 else v - 1
        report.append(Violation("range", vecs[xi], vecs[ai], float(residual)))
    sums = t.sum(axis=1)
    for xi in np.flatnonzero(np.abs(sums - 1) > NORM_TOL):
        report.append(Violation("normalization", vecs[xi], None, float(sums[xi] - 1)))
    return report


def require_valid(b: Behavior):
    report = validate_behavior(b)
    if report:
        raise ValidationError("invalid behavior: " + "; ".join(map(str, report[:5])))


def correlators(b: Behavior) -> FullCorrelation:
    """C(x) = sum_a (-1)^(a_1+...+a_N) P(a|x)."""
    require_valid(b)
    return FullCorrelation(b.scenario, b.table @ spin_signs(b.n_parties))


def bell_value(f: BellFunctional, b: Behavior) -> float:
    """sum_{x,a} beta(a|x) P(a|x); negative means ``b`` violates ``f``."""
    _same_scenario(f.scenario, b.scenario)
    return float(np.sum(f.coefficients * b.table))


def deterministic_behavior(s: Scenario, strategy) -> Behavior:
    """``strategy[n]`` is the pair (outcome for setting 1, outcome for setting 2)."""
    strategy = [tuple(int(o) for o in pair) for pair in strategy]
    if len(strategy) != s.n_parties or any(len(p) != 2 for p in strategy):
        raise StructuralError("strategy needs one (outcome|x=1, outcome|x=2) pair per party")
    if any(o not in (1, 2) for p in strategy for o in p):
        raise StructuralError("deterministic outcomes must be 1 or 2")
    table = np.zeros((s.n_vectors, s.n_vectors))
    for xi, x in enumerate(s.vectors()):
        a = tuple(strategy[n][x[n] - 1] for n in range(s.n_parties))
        table[xi, vector_index(a)] = 1.0
    return Behavior(s, table)


def mix(behaviors, weights) -> Behavior:
    """Convex (or any linear) combination of behaviors on a common scenario."""
    behaviors = list(behaviors)
    weights = np.asarray(weights, dtype=float)
    if len(behaviors) != len(weights) or not behaviors:
        raise StructuralError("need one weight per behavior")
    for b in behaviors[1:]:
        _same_scenario(behaviors[0].scenario, b.scenario)
    table = np.tensordot(weights, np.stack([b.table for b in behaviors]), axes=1)
    return Behavior(behaviors[0].scenario, table)


def uniform_behavior(s: Scenario) -> Behavior:
    return Behavior(s, np.full((s.n_vectors, s.n_vectors), 1.0 / s.n_vectors))


def pr_box() -> Behavior:
    """Two-party PR box: outcomes agree unless both settings are 2, then they differ."""
    s = Scenario(2)
    table = np.zeros((4, 4))
    for x in s.vectors():
        target = (x[0] - 1) * (x[1] - 1)
        for a in s.vectors():
            if ((a[0] - 1) ^ (a[1] - 1)) == target:
                table[vector_index(x), vector_index(a)] = 0.5
    return Behavior(s, table)


def correlator_functional(n_parties: int, weights: dict) -> BellFunctional:
    """Functional whose value is sum_x weights[x] * C(x)."""
    s = Scenario(n_parties)
    signs = spin_signs(n_parties)
    coeffs = np.zeros((s.n_vectors, s.n_vectors))
    for x, w in weights.items():
        coeffs[vector_index(x)] = w * signs
    return BellFunctional(s, coeffs)


def chsh_functional() -> BellFunctional:
    """C(1,1) + C(1,2) + C(2,1) - C(2,2) as a coefficient table."""
    return correlator_functional(2, {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): -1})


def mermin_functional() -> BellFunctional:
    """C(1,1,2) + C(1,2,1) + C(2,1,1) - C(2,2,2)."""
    return correlator_functional(
        3, {(1, 1, 2): 1, (1, 2, 1): 1, (2, 1, 1): 1, (2, 2, 2): -1})


def from_upper_bound(f: BellFunctional, bound: float) -> BellFunctional:
    """Turn ``value(f) <= bound`` into the homogeneous form ``bound - value(f) >= 0``."""
    return (-f).shifted(bound)


def from_lower_bound(f: BellFunctional, bound: float) -> BellFunctional:
    """Turn ``value(f) >= bound`` into ``value(f) - bound >= 0``."""
    return f.shifted(-bound)
