"""Bell scenarios with two dichotomic observables per party: classical
membership, Born-rule behaviors, projectivization, shared-vector stripping,
qubit-block compression, local filtering and see-saw optimization."""

from .classical import classical_bound, classical_bound_shift, enumerate_vertices, is_classical
from .compression import compress, party_jordan_blocks
from .projectivize import projectivize, projectivize_strategy
from .quantum import (
    LocalMeasurement,
    QuantumStrategy,
    born_behavior,
    check_projective,
    random_strategy,
)
from .reduction import check_rank_balance, range_overlaps, strip_shared_vectors
from .scenario import (
    Behavior,
    BellFunctional,
    Scenario,
    bell_value,
    correlators,
    deterministic_behavior,
    validate_behavior,
)
from .seesaw import SeesawConfig, bell_operator, seesaw
from .slocc import decompose, slocc_filter

__all__ = [
    "Behavior", "BellFunctional", "LocalMeasurement", "QuantumStrategy", "Scenario",
    "SeesawConfig", "bell_operator", "bell_value", "born_behavior", "check_projective",
    "check_rank_balance", "classical_bound", "classical_bound_shift", "compress",
    "correlators", "decompose", "deterministic_behavior", "enumerate_vertices",
    "is_classical", "party_jordan_blocks", "projectivize", "projectivize_strategy",
    "random_strategy", "range_overlaps", "seesaw", "slocc_filter", "strip_shared_vectors",
    "validate_behavior",
]
