"""Command-line entry point.

Subcommands:
  run      execute a batch experiment described by a JSON config
  verify   same, but with per-step lemma verification and audit forced on
  example  replay the straight-line family with the work-function rule

Exit status: 0 clean, 1 usage or configuration error, 2 lemma or audit
failure, 3 offline-oracle disagreement.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional, Sequence

from .errors import AuditError, ConfigError, WfalabError
from .exact import frac
from .harness import example_trace, load_config, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfalab",
        description="Exact two-server coordinate-problem laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a batch experiment")
    verify_p = sub.add_parser(
        "verify", help="run a batch with verification and audit forced on")
    for p in (run_p, verify_p):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out-dir", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="base seed")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    ex_p = sub.add_parser("example", help="replay the straight-line family")
    ex_p.add_argument("--m", type=int, required=True, help="number of requests")
    ex_p.add_argument("--lambda", dest="lam", default="1",
                      help="work-function multiplier as p/q")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "example":
            trace = example_trace(args.m, frac(args.lam))
            ratio = "" if trace.ratio is None else str(trace.ratio)
            print(f"algorithm: {trace.algorithm.label}")
            print(f"requests: {trace.n}")
            print(f"cost: {trace.total_cost}")
            print(f"opt: {trace.opt_cost}")
            print(f"ratio: {ratio}")
            print(f"nablaTotal: {trace.total_extended_cost}")
            return 0
        config = load_config(args.config)
        if args.command == "verify":
            config = dataclasses.replace(config, verify=True, audit=True)
        return run_experiment(config, out_dir=args.out_dir, seed=args.seed,
                              jobs=args.jobs)
    except AuditError as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except WfalabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
