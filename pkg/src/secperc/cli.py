"""Command-line front end: every operation as a reproducible experiment.

Subcommands: convert, chain, percolate, threshold, window, verify.  Output
is JSON (default) or CSV, to stdout or --out; every run echoes its full
configuration so it can be reproduced bit-exactly.  Exit code 2 on
validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import chain as chain_mod
from . import oracle
from . import percolation
from . import secret_state
from .errors import ValidationError
from .lattice import export_graph, transform_to_triangular
from .rng import subseed

SCHEMA_VERSION = 1
DEFAULT_SEED = 20110405


def _parse_probs(text: str) -> secret_state.SecretState:
    try:
        return secret_state.SecretState([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise ValidationError(f"bad probability vector {text!r}: {exc}") from exc


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational {text!r}: {exc}") from exc


def _emit(args, payload: dict, csv_rows: list[dict] | None = None) -> None:
    """Write the result envelope as JSON, or the tabular part as CSV."""
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        if not csv_rows:
            raise ValidationError(f"subcommand {payload['command']} has no CSV form")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(csv_rows[0]))
        writer.writeheader()
        writer.writerows(csv_rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, config: dict, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    }


def cmd_convert(args) -> None:
    if args.from_probs is not None:
        source = _parse_probs(args.from_probs)
        config = {"from": list(source.probs)}
    elif args.p is not None:
        source = secret_state.BiasedLink(args.p).state
        config = {"p": args.p}
    else:
        raise ValidationError("convert needs --p or --from")
    target = _parse_probs(args.to_probs) if args.to_probs else secret_state.SBIT
    config["to"] = list(target.probs)
    result = {
        "conversion_probability": secret_state.conversion_probability(source, target),
        "target_majorizes_source": secret_state.majorizes(target, source),
        "deterministic": secret_state.majorizes(target, source),
    }
    _emit(args, _envelope("convert", config, result))


def cmd_chain(args) -> None:
    spec = chain_mod.ChainSpec(args.n, args.p)
    config = {"n": args.n, "p": args.p, "seed": args.seed, "threads": args.threads}
    result = {
        "exact": chain_mod.exact_success_probability(spec),
        "upper_bound": chain_mod.success_upper_bound(spec),
        "naive": chain_mod.naive_success_probability(spec),
    }
    if args.simulate:
        config["trials"] = args.simulate
        sim = chain_mod.simulate(spec, args.simulate, args.seed, threads=args.threads)
        result["simulated"] = sim.frequency
        result["simulated_std_error"] = sim.std_error
    rows = [{"n": args.n, "p": args.p, **result}]
    _emit(args, _envelope("chain", config, result), rows)


def _resolved_graph(args):
    builder = percolation.family_builder(args.family, args.multiplicity)
    graph = builder(args.size)
    if args.strategy == "transform":
        if args.p is None:
            raise ValidationError("--strategy transform needs --p")
        return transform_to_triangular(graph, args.p)
    if args.p is not None:
        return graph.with_naive_strategy(args.p)
    if args.p_edge is not None:
        return graph.with_edge_probability(args.p_edge)
    raise ValidationError("percolate needs --p-edge or --p")


def cmd_percolate(args) -> None:
    graph = _resolved_graph(args)
    config = {
        "family": args.family,
        "size": args.size,
        "multiplicity": args.multiplicity,
        "strategy": args.strategy,
        "p": args.p,
        "p_edge": args.p_edge,
        "trials": args.trials,
        "seed": args.seed,
        "threads": args.threads,
    }
    crossing = percolation.spanning_probability(graph, args.trials, args.seed, args.threads)
    rows = []
    for t in range(min(args.trials, args.cluster_samples)):
        stats = percolation.sample_clusters(graph, subseed(args.seed, 1, t))
        rows.append(
            {
                "trial": t,
                "largest_fraction": stats.largest_fraction,
                "n_clusters": len(stats.sizes),
                "spanning": int(stats.spanning),
            }
        )
    result = {
        "crossing_frequency": crossing.frequency,
        "crossing_std_error": crossing.std_error,
        "nodes": graph.n_nodes,
        "edges": graph.n_edges,
        "cluster_samples": rows,
    }
    if rows:
        result["mean_largest_fraction"] = sum(r["largest_fraction"] for r in rows) / len(rows)
    if args.export_graph:
        with open(args.export_graph, "w") as fh:
            fh.write(export_graph(graph))
        result["graph_file"] = args.export_graph
    _emit(args, _envelope("percolate", config, result), rows)


def cmd_threshold(args) -> None:
    builder = percolation.family_builder(args.family, args.multiplicity)
    config = {
        "family": args.family,
        "multiplicity": args.multiplicity,
        "sizes": args.sizes,
        "trials": args.trials,
        "seed": args.seed,
        "threads": args.threads,
    }
    est = percolation.estimate_threshold(
        builder, args.sizes, args.trials, args.seed, threads=args.threads
    )
    result = {
        "p_c": est.estimate,
        "half_width": est.half_width,
        "bisection_value": est.bisection_value,
        "curve_intersections": list(est.curve_intersections),
        "sizes": list(est.sizes),
        "trials_per_point": est.trials_per_point,
        "sweep": [{"size": s, "p": p, "frequency": f} for s, p, f in est.sweep],
    }
    rows = [{"size": s, "p": p, "frequency": f} for s, p, f in est.sweep]
    _emit(args, _envelope("threshold", config, result), rows)


def cmd_window(args) -> None:
    config = {
        "p": args.p,
        "sizes": args.sizes,
        "trials": args.trials,
        "seed": args.seed,
        "threads": args.threads,
    }
    cmp = percolation.compare_window(args.p, args.sizes, args.trials, args.seed, args.threads)
    rows = [
        {
            "size": r.size,
            "naive_frequency": r.naive_frequency,
            "transformed_frequency": r.transformed_frequency,
            "gap": r.gap,
        }
        for r in cmp.rows
    ]
    result = {
        "naive_edge_prob": cmp.naive_edge_prob,
        "transformed_edge_prob": cmp.transformed_edge_prob,
        "rows": rows,
    }
    _emit(args, _envelope("window", config, result), rows)


def cmd_verify(args) -> None:
    p = _parse_fraction(args.p)
    config = {"n": args.n, "p": str(p)}
    joint, exact = oracle.enumerate_chain(args.n, p)
    ok, bias = oracle.verify_secrecy(joint)
    spec = chain_mod.ChainSpec(args.n, float(p))
    closed = chain_mod.exact_success_probability(spec)
    report = oracle.xor_uniqueness_check(p) if 0 < p <= Fraction(1, 2) else None
    result = {
        "secrecy_ok": ok,
        "max_bias": str(bias),
        "exact_success": str(exact),
        "exact_success_float": float(exact),
        "closed_form": closed,
        "closed_form_matches": abs(float(exact) - closed) <= 1e-12,
    }
    if report is not None:
        result["xor_survivors"] = [list(t) for t in report.survivors]
        result["xor_unique"] = set(report.survivors) == {
            oracle.UniquenessReport.XOR,
            oracle.UniquenessReport.XNOR,
        }
    _emit(args, _envelope("verify", config, result))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secperc",
        description="secret-correlation percolation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None, help="write output to this path")

    sp = sub.add_parser("convert", help="single-state conversion probability")
    sp.add_argument("--p", type=float, default=None, help="biased link parameter")
    sp.add_argument("--from", dest="from_probs", default=None, help="comma-separated vector")
    sp.add_argument("--to", dest="to_probs", default=None, help="target vector (default sbit)")
    common(sp)
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("chain", help="chain success: exact, bound, naive, simulated")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--simulate", type=int, default=0, metavar="TRIALS")
    common(sp)
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("percolate", help="crossing frequency and cluster statistics")
    sp.add_argument("--family", choices=percolation.FAMILIES, required=True)
    sp.add_argument("--size", type=int, required=True, metavar="L")
    sp.add_argument("--multiplicity", type=int, default=1)
    sp.add_argument("--p-edge", type=float, default=None, help="raw bond probability")
    sp.add_argument("--p", type=float, default=None, help="link parameter (resolved per strategy)")
    sp.add_argument("--strategy", choices=("naive", "transform"), default="naive")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--cluster-samples", type=int, default=8)
    sp.add_argument("--export-graph", default=None, metavar="PATH")
    common(sp)
    sp.set_defaults(func=cmd_percolate)

    sp = sub.add_parser("threshold", help="estimate the critical bond probability")
    sp.add_argument("--family", choices=percolation.FAMILIES, required=True)
    sp.add_argument("--sizes", type=lambda s: [int(x) for x in s.split(",")], default=[32, 64, 128])
    sp.add_argument("--multiplicity", type=int, default=1)
    sp.add_argument("--trials", type=int, default=20000)
    common(sp)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("window", help="naive vs transformed strategy comparison")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--sizes", type=lambda s: [int(x) for x in s.split(",")], default=[32, 64, 128])
    sp.add_argument("--trials", type=int, default=10000)
    common(sp)
    sp.set_defaults(func=cmd_window)

    sp = sub.add_parser("verify", help="exact rational secrecy and success check")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", required=True, help='rational link parameter, e.g. "1/4"')
    common(sp)
    sp.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
