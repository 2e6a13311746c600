"""Command-line entry point.

    geolam experiment E1 --seed 42 --samples 1000000 --out results/
    geolam density P --at 1.0
    geolam moment --n 3
    geolam trace --u -0.3 --v 2.7182818 --budget 50
    geolam closed-geodesic --word LRLL
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import closedform as cf
from .experiments import (
    EXIT_CONFIG, EXIT_IO, EXIT_LIBRARY, EXIT_PASS, EXIT_STAT_FAIL, ConfigError, ExperimentConfig, run_experiment,
)
from .farey import closed_geodesic_from_matrix, exact_pair, periodic_trace, trace, word_matrix
from .stats import fmt


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=42, help="64-bit RNG seed (default 42)")
    g.add_argument("--out", default=None, help="output directory (default $GEOLAM_OUT or ./geolam_out)")
    g.add_argument("--samples", type=int, default=None, help="sample / word / geodesic count")
    g.add_argument("--range", nargs=2, type=float, metavar=("A", "B"), default=None,
                   help="window [A, B] for restricted statistics")
    g.add_argument("--bins", type=int, default=50, help="histogram bins (>= 10)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geolam", description="Chord-length distributions of geodesics "
                                     "crossing ideal triangles: closed forms, sampling and Farey traces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run one of the experiments E1..E5")
    p.add_argument("experiment", choices=["E1", "E2", "E3", "E4", "E5"], type=str.upper)
    p.add_argument("--budget", type=float, default=None, help="length budget per trace (E2)")
    p.add_argument("--raw", action="store_true", help="also write raw samples")
    p.add_argument("--word-length", type=int, default=None, help="word length (E5)")
    p.add_argument("--word-mode", choices=["closing", "uniform"], default="closing",
                   help="how E5 draws its positive words")
    _common(p)

    p = sub.add_parser("density", help="evaluate a closed-form density")
    p.add_argument("kind", choices=["M", "P", "MT"], type=str.upper)
    p.add_argument("--at", type=float, required=True, help="x > 0")
    _common(p)

    p = sub.add_parser("moment", help="E_P(x^n)")
    p.add_argument("--n", type=int, required=True)
    _common(p)

    p = sub.add_parser("trace", help="trace a geodesic through the Farey tessellation")
    p.add_argument("--u", required=True, help="backward endpoint (decimal, p/q or inf)")
    p.add_argument("--v", required=True, help="forward endpoint (decimal, p/q or inf)")
    p.add_argument("--budget", type=float, required=True, help="length budget")
    p.add_argument("--steps", type=int, default=10 ** 7, help="step budget")
    _common(p)

    p = sub.add_parser("closed-geodesic", help="closed geodesic of an L/R word or matrix")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--word", help="word in L = [[1,0],[1,1]] and R = [[1,1],[0,1]]")
    grp.add_argument("--matrix", nargs=4, type=int, metavar=("A", "B", "C", "D"))
    _common(p)
    return parser


def _kv(key, value):
    if isinstance(value, float):
        value = fmt(value)
    print(f"{key}: {value}")


def _cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig(args.experiment, samples=args.samples, length_budget=args.budget,
                               window=tuple(args.range) if args.range else None, bins=args.bins,
                               seed=args.seed, out_dir=args.out, jobs=args.jobs, word_length=args.word_length,
                               word_mode=args.word_mode, raw=args.raw)
    except ConfigError as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    rep = run_experiment(cfg)
    print("\n".join(rep.lines()))
    print(f"outputs: {cfg.output_dir()} ({', '.join(rep.files)})")
    return EXIT_PASS if rep.passed else EXIT_STAT_FAIL


def _cmd_density(args) -> int:
    _kv(f"density_{args.kind}", float(cf.DISTRIBUTIONS[args.kind].density(args.at)))
    return EXIT_PASS


def _cmd_moment(args) -> int:
    _kv(f"moment_P_{args.n}", cf.moment_P(args.n))
    return EXIT_PASS


def _cmd_trace(args) -> int:
    r = trace((exact_pair(args.u), exact_pair(args.v)), args.budget, step_budget=args.steps,
              keep_triangles=False)
    _kv("segments", len(r))
    _kv("length_sum", r.length_sum)
    _kv("total_param_length", r.total_param_length)
    _kv("terminated", r.terminated_reason.value)
    _kv("word", r.word if len(r.word) <= 200 else r.word[:200] + "...")
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "trace_segments.csv", "w", encoding="utf-8", newline="\n") as f:
                f.write("index,length\n")
                f.writelines(f"{i},{fmt(x)}\n" for i, x in enumerate(r.lengths))
        except OSError as e:
            print(f"I/O error: {e}", file=sys.stderr)
            return EXIT_IO
    return EXIT_PASS


def _cmd_closed(args) -> int:
    m = word_matrix(args.word) if args.word else tuple(args.matrix)
    spec = closed_geodesic_from_matrix(*m)
    d = periodic_trace(spec)
    _kv("matrix", " ".join(str(t) for t in spec.matrix))
    _kv("trace", spec.trace)
    _kv("axis", f"{fmt(spec.axis.p)} -> {fmt(spec.axis.q)}")
    _kv("length", spec.length)
    _kv("segments", len(d.lengths))
    _kv("segment_sum", math.fsum(d.lengths))
    _kv("cutting_word", d.word)
    _kv("segment_lengths", " ".join(fmt(x) for x in d.lengths))
    return EXIT_PASS


_COMMANDS = {"experiment": _cmd_experiment, "density": _cmd_density, "moment": _cmd_moment,
             "trace": _cmd_trace, "closed-geodesic": _cmd_closed}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (IOError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, AssertionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LIBRARY


if __name__ == "__main__":
    sys.exit(main())
