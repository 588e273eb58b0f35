"""Command line entry point: ``crossext <subcommand> --config FILE --out-dir DIR``."""

from __future__ import annotations

import argparse
import json
import sys

from .harness import MODULES, ConfigError, load_config, run_scenario, verify


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crossext", description="Boundary cross extension toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    for name in MODULES:
        s = sub.add_parser(name, help=f"run a {name} scenario")
        s.add_argument("--config", required=True, help="scenario JSON file")
        s.add_argument("--out-dir", default=".", help="directory for artifacts and report.json")
        s.add_argument("--out", help="main artifact path (CSV, or report JSON for extend)")
        if name == "extend":
            s.add_argument("--csv", help="grid CSV path")
        s.add_argument("--seed", type=int)
        s.add_argument("--threads", type=int)
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--suite", choices=("fast", "full"), default="fast")
    v.add_argument("--config", help="optional JSON object of overrides, e.g. {\"N_max\": 0}")
    v.add_argument("--out-dir", help="directory for verify.json")
    v.add_argument("--seed", type=int)
    v.add_argument("--threads", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "verify":
            overrides = load_config(args.config) if args.config else {}
            report = verify(args.suite, overrides, args.out_dir, args.seed, args.threads)
            for line in report.details["lines"]:
                print(line)
        else:
            config = load_config(args.config)
            report = run_scenario(config, args.out_dir, args.command, args.seed, args.threads,
                                  out=args.out, csv_path=getattr(args, "csv", None))
            for c in report.checks:
                print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {json.dumps(c.to_dict()['value'])}")
            print("artifacts: " + ", ".join(report.artifacts))
    except ConfigError as exc:
        print(f"config error at {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
