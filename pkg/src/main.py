from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from src.config import ConfigManager
from src.core import AnalysisWorkflow, InputError, LoggingHook, SchedulingError
from src.experiments import REPRODUCTIONS
from src.mechanisms import MECHANISM_NAMES
from src.router import COMMANDS, CommandRouter, ReportService, StructuredCommand


def _assignment(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"assignment must be comma-separated machine indices, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anarchy-sched",
        description="Scheduling without payments: mechanisms, equilibria and price-of-anarchy experiments.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("name", nargs="?", help="result to reproduce: " + ", ".join(REPRODUCTIONS))
    parser.add_argument("--instance", type=Path, help="instance JSON file")
    parser.add_argument("--mechanism", choices=MECHANISM_NAMES)
    parser.add_argument("-L", type=float, dest="L")
    parser.add_argument("-c", type=float, dest="c")
    parser.add_argument("--grid-factor", type=float, dest="grid_factor")
    parser.add_argument("--grid-span", type=int, dest="grid_span")
    parser.add_argument("--eps", type=float)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output", choices=("json", "csv"))
    parser.add_argument("--out", type=Path, dest="output_path")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--n", type=int, dest="n")
    parser.add_argument("--m", type=int, dest="m")
    parser.add_argument("--M", type=float, dest="M")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--assignment", type=_assignment, help="task->machine indices for pos-certify, e.g. 0,1,2")
    parser.add_argument("--config", type=Path, help="JSON configuration file")
    parser.add_argument("--verbose", action="store_true", help="log workflow and solver events to stderr")
    return parser


def _configure_logging(verbose: bool) -> LoggingHook:
    level = logging.DEBUG if verbose else logging.WARNING
    hook = LoggingHook(level=level)
    library = logging.getLogger("anarchy_sched")
    library.setLevel(level)
    if verbose and not library.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
        library.addHandler(handler)
    return hook


def run(argv: Sequence[str] | None = None, *, service: ReportService | None = None) -> int:
    args = build_parser().parse_args(argv)
    hook = _configure_logging(args.verbose)
    flags = {
        "mechanism": args.mechanism,
        "L": args.L,
        "c": args.c,
        "grid_factor": args.grid_factor,
        "grid_span": args.grid_span,
        "eps": args.eps,
        "samples": args.samples,
        "seed": args.seed,
        "output": args.output,
        "output_path": args.output_path,
        "workers": args.workers,
    }
    reporter = service or ReportService()
    try:
        config = ConfigManager.from_path(args.config).build_run_config(flags)
        if args.command == "reproduce" and not args.name:
            raise InputError("reproduce needs a result name: " + ", ".join(REPRODUCTIONS))
        workflow = AnalysisWorkflow(router=CommandRouter(config), hooks=[hook])
        command = StructuredCommand(
            name=args.command,
            args={
                "instance": args.instance,
                "name": args.name,
                "n": args.n,
                "m": args.m,
                "M": args.M,
                "trials": args.trials,
                "assignment": args.assignment,
            },
        )
        outcome = workflow.process(command)
        reporter.write(reporter.render(outcome.payload, config.output), config.output_path)
    except SchedulingError as exc:
        print(f"anarchy-sched: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if outcome.summary:
        print(outcome.summary, file=sys.stderr)
    return outcome.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
