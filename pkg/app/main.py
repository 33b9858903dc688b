# main.py
from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from app.commands import (
    EXIT_CONFIG,
    EXIT_OK,
    CommandContext,
    cmd_compare,
    cmd_partition,
    cmd_place,
    cmd_profile,
    cmd_simulate,
    cmd_sweep_convergence,
    exit_code_for,
)
from app.config import load_config
from app.errors import ConfigError
from app.settings import TOOL_VERSION, settings

log = logging.getLogger("sliceplan")


def _capacity(text: str) -> tuple[float, float]:
    try:
        cpu, mem = (float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected CPU,MEM") from exc
    return cpu, mem


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config; defaults apply when omitted")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--exact-ceiling", type=int, default=None, help="largest instance the exact solver enumerates")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="sliceplan",
        description="Control-plane slicing: convergence sweeps, slice placement and discrete-event simulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("sweep-convergence", parents=[common], help="convergence time against partition count")
    sub.add_parser("profile", parents=[common], help="per-slice resource demands")
    sub.add_parser("place", parents=[common], help="place application slices on servers")
    sub.add_parser("simulate", parents=[common], help="run the controller simulator")

    compare = sub.add_parser("compare", parents=[common], help="simulate two configs and report the deltas")
    compare.add_argument("--against", required=True, help="candidate config compared with --config")

    part = sub.add_parser("partition", parents=[common], help="partition a weighted edge-list graph")
    part.add_argument("--graph", required=True)
    part.add_argument("--parts", type=int, required=True)
    part.add_argument("--capacity", type=_capacity, required=True, help="CPU,MEM per part")
    part.add_argument("--slack", type=float, default=1.0)
    return parser


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _context(args: argparse.Namespace) -> CommandContext:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    jobs = args.jobs if args.jobs is not None else settings.jobs
    if jobs < 1:
        raise ConfigError(f"--jobs must be at least 1 [jobs={jobs}]")
    return CommandContext(
        config=config,
        config_path=args.config,
        output_dir=args.out,
        exact_ceiling=args.exact_ceiling,
        jobs=jobs,
    )


def dispatch(args: argparse.Namespace) -> None:
    ctx = _context(args)
    if args.command == "sweep-convergence":
        cmd_sweep_convergence(ctx)
    elif args.command == "profile":
        cmd_profile(ctx)
    elif args.command == "place":
        cmd_place(ctx)
    elif args.command == "simulate":
        cmd_simulate(ctx)
    elif args.command == "compare":
        candidate = load_config(args.against)
        if args.seed is not None:
            candidate = candidate.model_copy(update={"seed": args.seed})
        cmd_compare(ctx, candidate, args.against)
    elif args.command == "partition":
        cmd_partition(ctx, args.graph, args.parts, args.capacity, slack=args.slack)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    _configure_logging(args.verbose)

    try:
        dispatch(args)
    except Exception as exc:
        code = exit_code_for(exc)
        if code == EXIT_CONFIG:
            log.error("Rejected input: %s", exc)
        else:
            log.error("Command failed [command=%s, exit=%s]: %s", args.command, code, exc)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
