import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from src.commands import COMMAND_MODULES
from src.commands.common import common_parser
from src.config.config import LOG_LEVEL
from src.utils.errors import CFSError, StructuralError

load_dotenv()

EXIT_OK = 0
EXIT_OTHER = 1


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Single stderr sink; stdout carries the command's JSON result."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=level.upper(),
        format="{time:YYYY-MM-DD HH:mm:ss} - {name} - {level} - {message}",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfs-lab",
        description="Numerical laboratory for causal fermion systems",
    )
    parser.add_argument("--log-level", default=None, help=f"log level (default: {LOG_LEVEL})")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parent = common_parser()
    for module in COMMAND_MODULES:
        module.register(subparsers, parent)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        return int(exc.code or 0)

    configure_logging(args.log_level or LOG_LEVEL)
    try:
        return args.handler(args)
    except CFSError as exc:
        logger.error("{}: {}", type(exc).__name__, exc)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("Invalid configuration: {}", exc)
        return StructuralError.exit_code
    except Exception:
        logger.exception("Unexpected failure in '{}'", args.command)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
