"""Report the extra memory of the batched solver"""
import argparse
from dataclasses import astuple

from batched_fmaps.commands.common import EXIT_OK, add_sweep_arguments, bench_config_from_args, open_output, report_error
from batched_fmaps.exceptions import FmapError
from batched_fmaps.services.bench_service import MEMORY_COLUMNS, BenchService
from batched_fmaps.utils import write_csv_report

NAME = "memory"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Tabulate batched versus loop memory in both precisions")
    add_sweep_arguments(parser)
    parser.add_argument("--no-cross-check", dest="cross_check", action="store_false",
                        help="Skip running the batched solver to confirm its reported bytes")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Write analytic memory rows for every k and precision

    Args:
        args (argparse.Namespace): Parsed arguments

    Returns:
        int: 0 on success, 2 on a usage error
    """
    try:
        config = bench_config_from_args(args)
        service = BenchService()
        rows = service.memory(config, cross_check=args.cross_check)
        with open_output(args.out) as stream:
            write_csv_report(stream, MEMORY_COLUMNS, (astuple(row) for row in rows),
                             service.report_header(NAME, config))
    except (FmapError, OSError) as e:
        return report_error(NAME, e)

    return EXIT_OK
