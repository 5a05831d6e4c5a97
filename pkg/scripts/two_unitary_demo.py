#!/usr/bin/env python3
"""Contrast two ways of resetting a qubit, across input distributions.

The swap erasure hands the system's entropy to a fresh environment qubit.
The "choose a unitary by the state" reset leaves the system in |0> too, but
the auxiliary that selected the unitary ends up holding the erased bit: its
mutual information with the initial bit equals the input entropy.

    python scripts/two_unitary_demo.py --steps 11
"""

import argparse

import numpy as np

from erasure_lab.quantum import DensityMatrix, controlled_unitary_demo, swap_erasure_demo


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=11)
    args = ap.parse_args()

    print(f"{'p(1)':>6} {'S_in':>9} {'swap dS_env':>12} {'ctrl I(bit;aux)':>16} {'ctrl S_sys':>11}")
    for p1 in np.linspace(0.0, 1.0, args.steps):
        p = (1.0 - p1, p1)
        swap = swap_erasure_demo(DensityMatrix.diag(p))
        ctrl = controlled_unitary_demo(p)
        print(
            f"{p1:>6.2f} {swap.s_initial_nats:>9.6f} {swap.delta_env_nats:>12.6f} "
            f"{ctrl.mutual_information_nats:>16.6f} {ctrl.s_system_final_nats:>11.2e}"
        )


if __name__ == "__main__":
    main()
