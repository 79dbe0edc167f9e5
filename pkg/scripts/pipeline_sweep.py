"""Random strategies through projectivize -> reduce -> compress -> filter.

For every seed: reconstruction residual of the block mixture, the number of
stripping steps, and (for CHSH-violating inputs) the filtered Bell value.
"""
import argparse
import time

import numpy as np

from qubitbell.linalg import random_mixed_state
from qubitbell.quantum import QuantumStrategy, born_behavior, embed_strategy, random_projective_measurement
from qubitbell.reduction import check_rank_balance
from qubitbell.scenario import bell_value, chsh_functional, from_lower_bound
from qubitbell.seesaw import SeesawConfig, seesaw
from qubitbell.slocc import decompose, slocc_filter


def random_unbalanced(dims, rng):
    ms = [random_projective_measurement(d, rng, ranks=rng.integers(0, d + 1, size=2)) for d in dims]
    return QuantumStrategy(random_mixed_state(int(np.prod(dims)), rng), tuple(ms))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dims", type=int, nargs="+", default=[4, 4])
    ap.add_argument("--noise", type=float, default=0.1)
    args = ap.parse_args()

    print("# reduction and compression of random unbalanced strategies")
    t0 = time.perf_counter()
    for k in range(args.count):
        rng = np.random.default_rng(args.seed + k)
        s = random_unbalanced(args.dims, rng)
        dec = decompose(s)
        st = dec.strips[0]
        balanced = st.reduced is None or all(r.balanced for r in check_rank_balance(st.reduced))
        print(f"seed {args.seed + k:3d}: steps {len(st.steps):2d}  residual weight {st.residual_weight:.4f}  "
              f"blocks {len(dec.block_components()):2d}  balanced {balanced}  "
              f"residual {dec.reconstruction_residual():.2e}")
    print(f"{time.perf_counter() - t0:.2f} s")

    print("# filtering embedded CHSH-optimal qubit strategies")
    f = from_lower_bound(chsh_functional(), -2)
    optimum = seesaw(f, SeesawConfig(restarts=5, seed=args.seed)).best_strategy
    for k in range(args.count):
        s = embed_strategy(optimum, args.dims, seed=args.seed + k, noise=args.noise)
        original = bell_value(f, born_behavior(s))
        if original >= 0:
            print(f"seed {args.seed + k:3d}: no violation ({original:.4f})")
            continue
        flt = slocc_filter(s, f)
        print(f"seed {args.seed + k:3d}: original {original:.6f}  filtered {flt.bell_values['filtered']:.6f}  "
              f"success probability {flt.success_probability:.4f}")


if __name__ == "__main__":
    main()
