"""`compute`: every requested observable at one separation."""
import argparse

from app.cli import deps
from app.cli.commands._report import print_records
from app.services.runner import run


def register(subparsers) -> None:
    parser = subparsers.add_parser("compute", help="evaluate at a single separation d")
    deps.add_run_arguments(parser)
    parser.add_argument("-d", "--separation", dest="d", type=float, help="sphere-plate separation in m")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    drop = ("sweep",) if args.d is not None else ()
    config = deps.get_run_config(args, drop=drop)
    deps.require(config.d is not None, "compute needs a single d (use `sweep` for a range)", field="d")
    outcome = run(config)
    print_records(outcome.records)
    return outcome.exit_code
