"""`tables`: dump the perfect-conductor series coefficients."""
import argparse
import csv
import json
import sys

from app.core.errors import DataError
from app.services.io import build_meta, format_float
from app.services.pc_series import table_rows

_FORMATS = ("text", "csv", "json")


def register(subparsers) -> None:
    parser = subparsers.add_parser("tables", help="print the beta/lambda coefficient tables")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--which", choices=["beta", "lambda", "both"], default="both")
    parser.add_argument("--format", choices=_FORMATS, default="text")
    parser.add_argument("-o", "--output", help="write here instead of stdout")
    parser.set_defaults(handler=handle)


def _rows(which: str):
    names = ["beta", "lambda"] if which == "both" else [which]
    return [(name, row) for name in names for row in table_rows(name)]


def render(which: str, fmt: str, fh) -> None:
    rows = _rows(which)
    if fmt == "json":
        payload = {
            "meta": build_meta(),
            "records": [
                {"table": name, "i": r.i, "j": r.j, "exact": r.exact, "decimal": r.decimal}
                for name, r in rows
            ],
        }
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    elif fmt == "csv":
        writer = csv.writer(fh)
        writer.writerow(["table", "i", "j", "exact", "decimal"])
        for name, r in rows:
            writer.writerow([name, r.i, r.j, r.exact, format_float(r.decimal)])
    else:
        for name, r in rows:
            print(f"{name}[{r.i},{r.j}] = {r.exact:<40} {r.decimal: .6f}", file=fh)


def handle(args: argparse.Namespace) -> int:
    if not args.output:
        render(args.which, args.format, sys.stdout)
        return 0
    try:
        with open(args.output, "w", newline="") as fh:
            render(args.which, args.format, fh)
    except OSError as exc:
        raise DataError(f"cannot write {args.output}: {exc}") from exc
    return 0
