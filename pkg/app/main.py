import argparse
import logging
import sys
from typing import List, Optional

from app.cli import deps
from app.cli.commands import COMMANDS
from app.core.config import get_settings
from app.core.errors import CasimirError

settings = get_settings()
logger = logging.getLogger("app")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir-sp",
        description="Sphere-plate Casimir interaction: PFA, next-to-leading order, "
                    "perfect-conductor series and exact scattering reference",
    )
    parser.add_argument("--version", action="version", version=f"{settings.PROJECT_NAME} {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # one module per subcommand
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    deps.configure_logging(args)
    try:
        return args.handler(args)
    except CasimirError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except KeyboardInterrupt:
        logger.error("interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
