"""Cross-check the solvers over a k sweep"""
import argparse
from dataclasses import astuple

from batched_fmaps.commands.common import (
    EXIT_CHECK_FAILED,
    EXIT_ERROR,
    EXIT_OK,
    add_sweep_arguments,
    bench_config_from_args,
    open_output,
    report_error,
)
from batched_fmaps.exceptions import FmapError
from batched_fmaps.services.bench_service import VERIFY_COLUMNS, BenchService
from batched_fmaps.utils import write_csv_report

NAME = "verify"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Check that the row-wise, batched and oracle solvers agree")
    add_sweep_arguments(parser)
    parser.add_argument("--record", action="store_true", help="Persist the run to the results database")
    parser.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Run the equivalence checks and write the comparison rows

    Args:
        args (argparse.Namespace): Parsed arguments

    Returns:
        int: 0 if every check passed, 1 if one failed, 2 on a solver or usage error
    """
    try:
        config = bench_config_from_args(args)
        service = BenchService(record=args.record)
        rows, passed = service.verify(config, inject_fault=args.inject_fault)
        with open_output(args.out) as stream:
            write_csv_report(
                stream,
                VERIFY_COLUMNS,
                (astuple(row) for row in rows),
                service.report_header(NAME, config),
                config.precision.csv_digits,
            )
    except (FmapError, OSError) as e:
        return report_error(NAME, e)
    except Exception as e:
        report_error(NAME, e)
        raise

    return EXIT_OK if passed else EXIT_CHECK_FAILED
