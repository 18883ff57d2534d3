"""`compare`: ratio report between two result files on the same d grid."""
import argparse

from app.cli import deps
from app.models.quantity import OutputFormat
from app.services.io import build_meta, write_comparison
from app.services.runner import compare


def register(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="ratios A/B of two result files")
    deps.add_common_arguments(parser)
    parser.add_argument("file_a")
    parser.add_argument("file_b")
    parser.add_argument(
        "--keys",
        default="sum",
        help="comma separated value keys (leading, ntlo, sum, normalized_leading, normalized_sum, theta)",
    )
    parser.add_argument("-o", "--output", help="write the ratio records here")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    keys = [k.strip() for k in args.keys.split(",") if k.strip()]
    report = compare(args.file_a, args.file_b, keys)
    for (kind, key), deviation in sorted(report.max_deviation.items()):
        print(f"{kind} {key}: max |ratio - 1| = {deviation:.6e}")
    if args.output:
        meta = build_meta(extra={"file_a": args.file_a, "file_b": args.file_b, "keys": keys})
        write_comparison(args.output, report.records, args.format, meta)
    return 0
