"""Energy-transfer slope against qudit dimension and against entropy.

Part 1: fixed five-line Gaussian weights, d = 3..10.
Part 2: d = 8, Gaussian width sweep; pairs (S_N, slope).
"""

import argparse

import numpy as np

from qfcomb.comb import ModeConvention, PhaseMask, WeightSpec, synthesize
from qfcomb.entanglement import density_from_pure, entropy_report, partial_trace
from qfcomb.walk import sweep_and_slope

DELTAS = np.linspace(0.0, 2.0, 5)


def slope(state):
    return sweep_and_slope(state, PhaseMask.zeros(), DELTAS).slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=2.0)
    ap.add_argument("--sigma-range", type=float, nargs=2, default=(0.6, 2.5))
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args()

    print("d,slope")
    for d in range(3, 11):
        print(f"{d},{slope(synthesize(ModeConvention(2 * d + 1), WeightSpec.gaussian(args.sigma, 2))):.10f}")

    print()
    print("sigma,S_N,slope")
    conv = ModeConvention(17)
    for s in np.linspace(*args.sigma_range, args.points):
        state = synthesize(conv, WeightSpec.gaussian(float(s), conv.max_order))
        sn = entropy_report(partial_trace(density_from_pure(state))).normalized
        print(f"{s:.4f},{sn:.10f},{slope(state):.10f}")


if __name__ == "__main__":
    main()
