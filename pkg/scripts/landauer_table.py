#!/usr/bin/env python3
"""Tabulate the exhaustive minimum entropy cost of erasure over a grid of (M, N).

Every point is a full oracle run; points whose enumeration exceeds the budget
are reported as refused rather than sampled.

    python scripts/landauer_table.py --max-dim 4 --max-ensemble 3
"""

import argparse
import math

from erasure_lab.cli import auto_trits
from erasure_lab.oracle import BudgetExceeded, min_final_env_union, verify_disjointness, verify_state_independence
from erasure_lab.revmap import ErasureSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-dim", type=int, default=4)
    ap.add_argument("--max-ensemble", type=int, default=3)
    ap.add_argument("--budget", type=int, default=2_000_000)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'M':>3} {'T':>3} {'N':>3} {'maps':>10} {'min|U|':>7} {'delta/k':>10} {'ln M':>10} {'indep':>6} {'disj':>6}")
    for M in range(1, args.max_dim + 1):
        for N in range(1, args.max_ensemble + 1):
            T = auto_trits(M, N)
            spec = ErasureSpec.build(M, T, N)
            try:
                r = min_final_env_union(spec, args.budget, args.workers)
            except BudgetExceeded as exc:
                print(f"{M:>3} {T:>3} {N:>3} {'refused':>10}  ({exc})")
                continue
            ind = verify_state_independence(spec, result=r).ok
            dis = verify_disjointness(spec, result=r).ok
            print(
                f"{M:>3} {T:>3} {N:>3} {r.maps_examined:>10} {r.min_union:>7} "
                f"{r.delta.nats:>10.6f} {math.log(M):>10.6f} {str(ind):>6} {str(dis):>6}"
            )


if __name__ == "__main__":
    main()
