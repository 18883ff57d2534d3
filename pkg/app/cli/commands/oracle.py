"""`oracle`: exact scattering energy, optionally converged in l_max."""
import argparse

from app.cli import deps
from app.cli.commands._report import print_records
from app.models.quantity import Method, Quantity
from app.services.runner import run


def register(subparsers) -> None:
    parser = subparsers.add_parser("oracle", help="exact round-trip energy (reference values)")
    deps.add_run_arguments(parser, with_method=False)
    deps.add_sweep_arguments(parser)
    parser.add_argument("-d", "--separation", dest="d", type=float, help="sphere-plate separation in m")
    parser.add_argument("--l-max", type=int, help="multipole truncation (default ceil(8 R/d), capped)")
    parser.add_argument("--converge", action="store_const", const=True, help="raise l_max until the energy settles")
    parser.add_argument("--step", type=int, help="l_max increment for --converge")
    parser.add_argument("--xi-nodes", type=int)
    parser.add_argument("--theta-nodes", type=int)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    drop = ("sweep",) if args.d is not None else ()
    config = deps.get_run_config(args, drop=drop, method=Method.EXACT.value, quantity=Quantity.ENERGY.value)
    outcome = run(config)
    print_records(outcome.records)
    for record in outcome.records:
        diag = record.diagnostics
        if diag.l_max_trace:
            print(f"d={record.d:.6e} m  l_max trace: {', '.join(map(str, diag.l_max_trace))}")
        elif diag.l_max is not None:
            print(f"d={record.d:.6e} m  l_max = {diag.l_max}")
    return outcome.exit_code
