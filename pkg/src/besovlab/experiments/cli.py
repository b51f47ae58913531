"""Command line entry point: ``besovlab run <config> [flags]``."""
from __future__ import annotations

import argparse
import os
import sys

from .config import FORMATS, ConfigError, load_config
from .report import build_report, emit, report_hash
from .suites import BracketInvalid, run_suite

OUT_ENV = "BESOVLAB_OUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="besovlab", description="Run a configured experiment and write its report.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a key=value config file")
    run.add_argument("config", help="path to a flat key=value config file")
    run.add_argument("--grid", type=int, help="points per direction M")
    run.add_argument("--dim", type=int, choices=(2, 3), help="space dimension N")
    run.add_argument("--eps", type=float, help="data amplitude")
    run.add_argument("--gamma", type=float, help="pressure exponent")
    run.add_argument("--formulation", choices=("original", "effective"))
    run.add_argument("--out", help=f"output directory (overrides ${OUT_ENV} and the config)")
    run.add_argument("--format", choices=FORMATS)
    run.add_argument("--seed", type=int)
    run.add_argument("--quiet", action="store_true", help="print only the summary line")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or os.environ.get(OUT_ENV) or None
    try:
        cfg = load_config(
            args.config,
            grid=args.grid,
            dim=args.dim,
            eps=args.eps,
            gamma=args.gamma,
            formulation=args.formulation,
            out=out,
            format=args.format,
            seed=args.seed,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_suite(cfg)
    except BracketInvalid as exc:
        print(f"BracketInvalid: {exc}", file=sys.stderr)
        return 2
    report = build_report(cfg, result)
    try:
        paths = emit(report, cfg.out, cfg.format, cfg.extra_list)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        for c in result.checks:
            print(c.line())
    n_fail = sum(not c.passed for c in result.checks)
    print(f"{cfg.kind}: {len(result.checks) - n_fail}/{len(result.checks)} checks passed; "
          f"report {report_hash(report)[:16]} -> {', '.join(str(p) for p in paths)}")
    return 1 if n_fail else 0


if __name__ == "__main__":
    sys.exit(main())
