"""Command-line entry point: ``chainmarket run|check|fuzz``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .fuzz import dump_scenario, fuzz
from .scenario import EXIT_OK, EXIT_PARSE, ParseError, RunReport, load_scenario, run_scenario


def _emit(report: RunReport, fmt: str, report_dir: Optional[str]) -> None:
    if report_dir:
        out = Path(report_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{report.scenario}.json").write_text(report.to_json(), encoding="utf-8")
        (out / f"{report.scenario}.txt").write_text(report.to_text(), encoding="utf-8")
    sys.stdout.write(report.to_json() if fmt == "structured" else report.to_text())


def cmd_run(args: argparse.Namespace) -> int:
    report = run_scenario(args.scenario, seed=args.seed, strict=args.strict)
    _emit(report, args.format, args.report_dir)
    return report.exit_status


def cmd_check(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ParseError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(f"{args.scenario}: ok ({len(scenario.commands)} commands)")
    return EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    scenario, report = fuzz(args.steps, args.seed)
    if args.out:
        Path(args.out).write_text(dump_scenario(scenario), encoding="utf-8")
    _emit(report, args.format, args.report_dir)
    return report.exit_status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainmarket", description="Deterministic multichain NFT marketplace simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--strict", action="store_true", help="stop at the first invariant violation")
    run.add_argument("--report-dir")
    run.add_argument("--format", choices=("text", "structured"), default="text")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="parse a scenario file without running it")
    check.add_argument("scenario")
    check.set_defaults(func=cmd_check)

    fz = sub.add_parser("fuzz", help="generate and run a random scenario")
    fz.add_argument("--steps", type=int, default=200)
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--out", help="write the generated scenario here")
    fz.add_argument("--report-dir")
    fz.add_argument("--format", choices=("text", "structured"), default="text")
    fz.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
