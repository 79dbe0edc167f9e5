"""Command-line interface.

Exit codes: 0 success, 2 validation errors (including malformed JSON),
3 precondition errors, 4 internal consistency failures.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import serialization as ser
from .classical import classical_bound, is_classical
from .compression import compress
from .errors import BellError, PreconditionError
from .projectivize import projectivize_strategy
from .quantum import born_behavior, is_projective, random_strategy
from .reduction import strip_shared_vectors
from .scenario import bell_value, mix
from .seesaw import SeesawConfig, seesaw
from .slocc import decompose, slocc_filter

DEFAULT_SEED = 1234

log = logging.getLogger("qubitbell")


def _emit(doc, args):
    text = ser.render(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _residuals(args, **values):
    if args.tol_report:
        for k, v in values.items():
            print(f"{k}: {v:.3e}", file=sys.stderr)


def cmd_evaluate(args):
    s = ser.strategy_from_json(ser.load_json(args.strategy))
    _emit(ser.behavior_to_json(born_behavior(s)), args)


def cmd_classify(args):
    b = ser.behavior_from_json(ser.load_json(args.behavior))
    cert = is_classical(b)
    _residuals(args, slack=cert.slack)
    _emit(ser.certificate_to_json(cert), args)


def cmd_projectivize(args):
    s = ser.strategy_from_json(ser.load_json(args.strategy))
    m = projectivize_strategy(s)
    if args.tol_report:
        rec = mix([born_behavior(t) for t in m.strategies], m.weights)
        _residuals(args, behavior_residual=float(np.max(np.abs(rec.table - born_behavior(s).table))))
    _emit(ser.mixture_to_json(m), args)


def cmd_reduce(args):
    s = ser.strategy_from_json(ser.load_json(args.strategy))
    st = strip_shared_vectors(s)
    if args.tol_report:
        _residuals(args, behavior_residual=float(
            np.max(np.abs(st.reconstruct_behavior().table - born_behavior(s).table))))
    _emit(ser.strip_to_json(st), args)


def cmd_compress(args):
    s = ser.strategy_from_json(ser.load_json(args.strategy))
    if not is_projective(s):
        raise PreconditionError("compress needs projective measurements; use `pipeline` for POVMs")
    st = strip_shared_vectors(s)
    if st.reduced is None:
        raise PreconditionError(f"party {st.factorized_party} factorizes completely; no qubit blocks")
    bd = compress(st.reduced)
    comps = st.components()[:-1]
    rec = mix([born_behavior(t) for _, t in comps] + [bd.reconstruct_behavior()],
              [w for w, _ in comps] + [st.residual_weight])
    residual = float(np.max(np.abs(rec.table - born_behavior(s).table)))
    _residuals(args, reconstruction_residual=residual)
    doc = ser.compression_to_json(bd, residual)
    doc["stripped_steps"] = len(st.steps)
    doc["residual_weight"] = float(st.residual_weight)
    _emit(doc, args)


def cmd_filter(args):
    s = ser.strategy_from_json(ser.load_json(args.strategy))
    f = ser.functional_from_json(ser.load_json(args.functional))
    _emit(ser.filter_to_json(slocc_filter(s, f)), args)


def cmd_optimize(args):
    f = ser.functional_from_json(ser.load_json(args.functional))
    cfg = SeesawConfig(restarts=args.restarts, max_rounds=args.max_rounds,
                       convergence_tol=args.tol, seed=args.seed,
                       local_dims=tuple(args.dims) if args.dims else None, rank=args.rank)
    res = seesaw(f, cfg)
    if not all(res.converged):
        log.warning("%d restarts hit max_rounds without converging",
                    res.converged.count(False))
    _emit(ser.seesaw_to_json(res), args)


def cmd_random(args):
    s = random_strategy(args.dims, pure=not args.mixed, projective=not args.povm, seed=args.seed)
    _emit(ser.strategy_to_json(s), args)


@dataclass
class PipelineReport:
    n_parties: int
    dims: list
    behavior_digest: str
    certificate_kind: str
    projective_terms: int
    reduction_steps: int
    residual_weights: list
    blocks_per_party: list  # per projective term
    block_weights: list  # per projective term, {block key: weight}
    reconstruction_residual: float
    bell_values: dict = field(default_factory=dict)
    exit_status: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    def render_text(self) -> str:
        lines = [
            f"parties: {self.n_parties}  local dims: {self.dims}",
            f"behavior digest: {self.behavior_digest}",
            f"classical certificate: {self.certificate_kind}",
            f"projective terms: {self.projective_terms}",
            f"reduction steps: {self.reduction_steps}  residual weights: "
            + ", ".join(f"{w:.6g}" for w in self.residual_weights),
        ]
        for t, (bpp, bw) in enumerate(zip(self.blocks_per_party, self.block_weights)):
            ws = ", ".join(f"[{k}] {w:.6g}" for k, w in bw.items())
            lines.append(f"term {t}: blocks per party {bpp}; weights {ws}")
        lines.append(f"reconstruction residual: {self.reconstruction_residual:.3e}")
        for k, v in self.bell_values.items():
            lines.append(f"bell value ({k}): " + ("n/a" if v is None else f"{v:.12g}"))
        lines.append(f"exit status: {self.exit_status}")
        return "\n".join(lines)


def build_report(s, f) -> PipelineReport:
    b = born_behavior(s)
    digest = hashlib.sha256(json.dumps(ser.behavior_to_json(b)).encode()).hexdigest()[:16]
    cert = is_classical(b)
    dec = decompose(s)
    original = bell_value(f, b)
    blocks = dec.block_components()
    best_block = min((bell_value(f, c.behavior()) for c in blocks), default=None)
    filtered = None
    if original < 0:
        filtered = slocc_filter(s, f).bell_values["filtered"]
    return PipelineReport(
        n_parties=s.n_parties,
        dims=list(s.local_dims),
        behavior_digest=digest,
        certificate_kind=cert.kind,
        projective_terms=len(dec.mixture),
        reduction_steps=sum(len(st.steps) for st in dec.strips),
        residual_weights=[float(st.residual_weight) for st in dec.strips],
        blocks_per_party=[[pb.r for pb in bd.party_blocks] if bd else [] for bd in dec.compressions],
        block_weights=[{ser.block_key(k): float(w) for k, w in sorted(bd.weights.items())}
                       if bd else {} for bd in dec.compressions],
        reconstruction_residual=dec.reconstruction_residual(b),
        bell_values={"original": original, "best_block": best_block, "filtered": filtered,
                     "classical_bound": classical_bound(f)},
    )


def cmd_pipeline(args):
    s = ser.strategy_from_json(ser.load_json(args.strategy))
    f = ser.functional_from_json(ser.load_json(args.functional))
    report = build_report(s, f)
    print(report.render_text())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(ser.render(report.to_json()) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"seed for randomized commands (default {DEFAULT_SEED})")
    common.add_argument("--tol-report", action="store_true", help="print residuals to stderr")

    p = argparse.ArgumentParser(prog="qubitbell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("evaluate", cmd_evaluate, "strategy -> behavior").add_argument("strategy")
    add("classify", cmd_classify, "behavior -> classical membership certificate").add_argument("behavior")
    add("projectivize", cmd_projectivize, "strategy -> mixture of projective strategies").add_argument("strategy")
    add("reduce", cmd_reduce, "strip shared vectors from a projective strategy").add_argument("strategy")
    add("compress", cmd_compress, "qubit-block decomposition of a projective strategy").add_argument("strategy")
    sp = add("filter", cmd_filter, "local rank-two filter for a violated functional")
    sp.add_argument("strategy")
    sp.add_argument("functional")
    sp = add("optimize", cmd_optimize, "see-saw minimization of a functional")
    sp.add_argument("functional")
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--max-rounds", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--dims", type=int, nargs="+")
    sp.add_argument("--rank", choices=["balanced", "free"], default="balanced")
    sp = add("pipeline", cmd_pipeline, "projectivize -> reduce -> compress -> filter report")
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--functional", required=True)
    sp = add("random", cmd_random, "random strategy generator")
    sp.add_argument("--dims", type=int, nargs="+", required=True)
    sp.add_argument("--mixed", action="store_true", help="full-rank mixed state")
    sp.add_argument("--povm", action="store_true", help="non-projective effects")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except BellError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return 0


def main():
    sys.exit(run())
