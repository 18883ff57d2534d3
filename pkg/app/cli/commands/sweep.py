"""`sweep`: a grid of separations dispatched to the worker pool."""
import argparse

from app.cli import deps
from app.cli.commands._report import print_records
from app.services.runner import run


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="evaluate over a range of separations")
    deps.add_run_arguments(parser)
    deps.add_sweep_arguments(parser)
    parser.add_argument("--quiet", action="store_true", help="do not print the table")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    has_sweep_flags = any(v is not None for v in (args.sweep_min, args.sweep_max, args.points))
    config = deps.get_run_config(args, drop=("d",) if has_sweep_flags else ())
    deps.require(config.sweep is not None, "sweep needs [sweep] min/max/points or --min/--max/--points", field="sweep")
    outcome = run(config)
    if not args.quiet:
        print_records(outcome.records)
    return outcome.exit_code
