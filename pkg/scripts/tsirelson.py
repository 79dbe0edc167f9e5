"""See-saw CHSH search on qubits and on larger local dimensions.

Qubit strategies should reach 2*sqrt(2); larger local spaces must not exceed it.
"""
import argparse
import time

import numpy as np

from qubitbell.scenario import chsh_functional
from qubitbell.seesaw import SeesawConfig, seesaw


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    args = ap.parse_args()

    f = chsh_functional()
    print(f"2*sqrt(2) = {2 * np.sqrt(2):.12f}")
    for d in args.dims:
        for rank in ("balanced", "free") if d > 2 else ("balanced",):
            cfg = SeesawConfig(restarts=args.restarts, seed=args.seed, local_dims=(d, d), rank=rank)
            t0 = time.perf_counter()
            res = seesaw(f, cfg)
            dt = time.perf_counter() - t0
            print(f"d={d} rank={rank:8s} |CHSH| = {-res.best_value:.12f}  "
                  f"converged {sum(res.converged)}/{len(res.converged)}  {dt:.2f} s")


if __name__ == "__main__":
    main()
