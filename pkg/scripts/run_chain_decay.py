#!/usr/bin/env python3
"""Tabulate the relay-chain success probability against its naive and
exponential-envelope companions as the chain grows."""

import argparse

from secperc import (
    ChainSpec,
    exact_success_probability,
    naive_success_probability,
    simulate,
    success_upper_bound,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=float, default=0.25)
    parser.add_argument("--max-n", type=int, default=20)
    parser.add_argument("--simulate", type=int, default=0, metavar="TRIALS")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    header = "n,naive,exact,upper_bound"
    if args.simulate:
        header += ",simulated,std_error"
    print(header)
    for n in range(1, args.max_n + 1):
        spec = ChainSpec(n, args.p)
        row = (
            f"{n},{naive_success_probability(spec):.6e},"
            f"{exact_success_probability(spec):.6e},{success_upper_bound(spec):.6e}"
        )
        if args.simulate:
            result = simulate(spec, args.simulate, args.seed)
            row += f",{result.frequency:.6f},{result.std_error:.6f}"
        print(row)


if __name__ == "__main__":
    main()
