"""Command-line entry point for the functional map toolkit"""
import argparse
import logging
import sys

from batched_fmaps.commands import COMMANDS
from batched_fmaps.commands.common import EXIT_ERROR
from batched_fmaps.config import LOG_LEVEL

LOG_FORMAT = "%(levelname)s [%(name)s] %(message)s"


def build_parser() -> argparse.ArgumentParser:
    """Root parser with one subcommand per command module."""
    parser = argparse.ArgumentParser(
        prog="batched-fmaps",
        description="Batched functional map solvers, gradient-feature checks and overlap-metric sweeps",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                        type=str.upper, help="Logging level (logs go to standard error)")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging and run the chosen command.

    Returns:
        Process exit status: 0 success, 1 failed check, 2 usage or solver error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0

    configure_logging(args.log_level)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_ERROR

    logging.debug(f"main: running {args.command}")
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
