"""JSON documents for behaviors, functionals, strategies and results.

Complex matrices are flat row-major lists of ``[re, im]`` pairs. Python's
float repr is shortest-round-trip, so ``json.loads(json.dumps(doc)) == doc``.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import StructuralError, ValidationError
from .quantum import LocalMeasurement, QuantumStrategy
from .scenario import Behavior, BellFunctional


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def decode_matrix(data, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise StructuralError("matrix must be a list of [re, im] pairs")
    size = arr.shape[0]
    d = math.isqrt(size) if dim is None else dim
    if d * d != size:
        raise StructuralError(f"{size} entries do not form a square matrix of dimension {d}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(d, d)


def behavior_to_json(b: Behavior) -> dict:
    return {"n_parties": b.n_parties, "probabilities": [float(v) for v in b.flat()]}


def behavior_from_json(doc: dict) -> Behavior:
    try:
        return Behavior.from_flat(int(doc["n_parties"]), doc["probabilities"])
    except KeyError as e:
        raise StructuralError(f"behavior document is missing {e}") from None


def functional_to_json(f: BellFunctional) -> dict:
    return {"n_parties": f.n_parties, "coefficients": [float(v) for v in f.flat()]}


def functional_from_json(doc: dict) -> BellFunctional:
    try:
        return BellFunctional.from_flat(int(doc["n_parties"]), doc["coefficients"])
    except KeyError as e:
        raise StructuralError(f"functional document is missing {e}") from None


def strategy_to_json(s: QuantumStrategy) -> dict:
    return {
        "dims": list(s.local_dims),
        "state": encode_matrix(s.state),
        "measurements": [[[encode_matrix(m.effect(a, x)) for a in (1, 2)] for x in (1, 2)]
                         for m in s.measurements],
    }


def strategy_from_json(doc: dict) -> QuantumStrategy:
    try:
        dims = [int(d) for d in doc["dims"]]
        ms = []
        for d, party in zip(dims, doc["measurements"]):
            eff = np.array([[decode_matrix(party[x][a], d) for a in (0, 1)] for x in (0, 1)])
            ms.append(LocalMeasurement(eff))
        if len(ms) != len(dims):
            raise StructuralError("one measurement entry per party is required")
        rho = decode_matrix(doc["state"], int(np.prod(dims)))
    except KeyError as e:
        raise StructuralError(f"strategy document is missing {e}") from None
    except (IndexError, TypeError) as e:
        raise StructuralError(f"malformed strategy document: {e}") from None
    return QuantumStrategy(rho, tuple(ms))


def certificate_to_json(cert) -> dict:
    doc = {"kind": cert.kind, "slack": float(cert.slack)}
    if cert.is_member:
        doc["weights"] = {str(k): float(v) for k, v in sorted(cert.weights.items())}
    else:
        doc["separating_functional"] = functional_to_json(cert.separating_functional)
    return doc


def mixture_to_json(mix) -> dict:
    return {"weights": [float(w) for w in mix.weights],
            "strategies": [strategy_to_json(s) for s in mix.strategies]}


def strip_to_json(st) -> dict:
    return {
        "reduced": None if st.reduced is None else strategy_to_json(st.reduced),
        "steps": [{
            "party": step.party,
            "pair": [list(step.pair[0]), list(step.pair[1])],
            "removed_vector": encode_matrix(step.removed_vector),
            "factor_weight": float(step.factor_weight),
            "absolute_weight": float(step.absolute_weight),
            "assignment": list(step.assignment),
            "local_dim_after": step.local_dim_after,
        } for step in st.steps],
        "residual_weight": float(st.residual_weight),
        "factorized_party": st.factorized_party,
    }


def block_key(kvec) -> str:
    return ",".join(str(k) for k in kvec)


def blocks_to_json(bd) -> list:
    return [{
        "party": pb.party,
        "r": pb.r,
        "blocks": [{"frame": encode_matrix(b.frame), "frame_shape": list(b.frame.shape),
                    "angle": float(b.angle), "g_eigenvalue": b.g_eigenvalue}
                   for b in pb.blocks],
    } for pb in bd.party_blocks]


def compression_to_json(bd, residual: float) -> dict:
    return {
        "blocks": blocks_to_json(bd),
        "weights": {block_key(k): float(w) for k, w in sorted(bd.weights.items())},
        "qubit_strategies": {block_key(k): strategy_to_json(bd.qubit_strategy(k))
                             for k in bd.retained()},
        "reconstruction_residual": float(residual),
    }


def filter_to_json(flt) -> dict:
    return {
        "projectors": [encode_matrix(x) for x in flt.projectors],
        "success_probability": float(flt.success_probability),
        "filtered_state": encode_matrix(flt.filtered_state),
        "filtered_strategy": strategy_to_json(flt.filtered_strategy),
        "bell_values": {k: float(v) for k, v in flt.bell_values.items()},
        "term": flt.term,
        "block": list(flt.block),
    }


def seesaw_to_json(res) -> dict:
    return {
        "best_value": float(res.best_value),
        "best_strategy": strategy_to_json(res.best_strategy),
        "per_restart_values": [float(v) for v in res.per_restart_values],
        "rounds_used": [int(r) for r in res.rounds_used],
        "converged": [bool(c) for c in res.converged],
    }


def render(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False)


def load_json(path: str):
    """Parse a JSON file; syntax errors name the file and byte offset."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
        return json.loads(text)
    except UnicodeDecodeError as e:
        raise ValidationError(f"{path}: not UTF-8 at byte offset {e.start}") from None
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode("utf-8"))
        raise ValidationError(f"{path}: malformed JSON at byte offset {offset}: {e.msg}") from None
