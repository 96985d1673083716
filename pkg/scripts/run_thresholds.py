#!/usr/bin/env python3
"""Estimate the bond-percolation thresholds of all three lattice families
and compare them against the known critical values."""

import argparse
import time

from secperc import estimate_threshold
from secperc.percolation import family_builder

REFERENCE = {"triangular": 0.3473, "honeycomb": 0.6527, "square": 0.5}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,64,128",
                        type=lambda s: [int(x) for x in s.split(",")])
    parser.add_argument("--trials", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--threads", type=int, default=2)
    args = parser.parse_args()

    print(f"sizes={args.sizes} trials={args.trials} seed={args.seed}")
    print(f"{'family':<12} {'estimate':>9} {'half-width':>11} {'reference':>10} {'error':>9} {'time':>7}")
    for family, reference in REFERENCE.items():
        start = time.time()
        est = estimate_threshold(
            family_builder(family), args.sizes, args.trials, args.seed, threads=args.threads
        )
        print(
            f"{family:<12} {est.estimate:>9.4f} {est.half_width:>11.4f} "
            f"{reference:>10.4f} {est.estimate - reference:>+9.4f} {time.time() - start:>6.1f}s"
        )


if __name__ == "__main__":
    main()
