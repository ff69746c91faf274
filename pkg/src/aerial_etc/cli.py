"""Command-line entry point: ``python -m aerial_etc {run,compare,sweep,bound}``.

Exit codes: 0 success, 2 configuration error, 3 divergence.
"""

from __future__ import annotations

import argparse
import glob
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import ConfigError, load_config
from .harness import (
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_OK,
    compare,
    diagnostic_tail,
    format_comparison,
    format_comparison_kv,
    read_metrics,
    run_experiment,
)
from .sim import settling_bound, value_bound


def _summary(name: str, m) -> str:
    return (f"{name}: {m.controller} {m.trajectory} mean |e| = "
            f"({m.mean_x:.4f}, {m.mean_y:.4f}, {m.mean_z:.4f}) m, "
            f"events {m.event_count}/{m.total_ticks} (ratio {m.transmission_ratio:.3f}), "
            f"runtime {m.runtime:.2f} s")


def _run_one(path: str, out: str | None) -> tuple[int, str]:
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        return EXIT_CONFIG, f"config error: {exc}"
    outcome = run_experiment(cfg, out)
    text = _summary(cfg.name, outcome.metrics) + f"\n  -> {outcome.out_dir}"
    if outcome.exit_code == EXIT_DIVERGED:
        text += "\n" + diagnostic_tail(outcome.result)
    return outcome.exit_code, text


def cmd_run(args) -> int:
    code, text = _run_one(args.config, args.out)
    print(text, file=sys.stdout if code == EXIT_OK else sys.stderr)
    return code


def cmd_sweep(args) -> int:
    paths = sorted(glob.glob(args.pattern))
    if not paths:
        print(f"config error: no files match {args.pattern!r}", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_run_one, paths, [args.out] * len(paths)))
    else:
        outcomes = [_run_one(p, args.out) for p in paths]
    for code, text in outcomes:
        print(text, file=sys.stdout if code == EXIT_OK else sys.stderr)
    return max(code for code, _ in outcomes)


def cmd_compare(args) -> int:
    try:
        ours, ref = read_metrics(args.metrics_a), read_metrics(args.metrics_b)
        c = compare(ours, ref)
    except (ConfigError, ValueError) as exc:
        print(f"compare error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(format_comparison_kv(c) if args.format == "kv" else format_comparison(c))
    return EXIT_OK


def cmd_bound(args) -> int:
    try:
        T = settling_bound(args.l, args.m, args.p, args.omega)
        print(f"T ≤ {T:.10g}")
        if args.n is not None:
            print(f"V ≤ {value_bound(args.l, args.m, args.n, args.p, args.omega):.10g}")
    except ValueError as exc:
        print(f"bound error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aerial_etc", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run one configuration")
    r.add_argument("config")
    r.add_argument("--out", help="override the configured output directory")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="reduction table of run A against reference run B")
    c.add_argument("metrics_a", help="metrics file of the run being evaluated")
    c.add_argument("metrics_b", help="metrics file of the reference run")
    c.add_argument("--format", choices=("table", "kv"), default="table")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="run every configuration matching a glob")
    s.add_argument("pattern")
    s.add_argument("--out", help="override the configured output directory")
    s.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bound", help="settling-time and residual bounds")
    b.add_argument("--l", type=float, required=True)
    b.add_argument("--m", type=float, required=True)
    b.add_argument("--n", type=float)
    b.add_argument("--omega", type=float, required=True)
    b.add_argument("--p", type=float, required=True)
    b.set_defaults(func=cmd_bound)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)
