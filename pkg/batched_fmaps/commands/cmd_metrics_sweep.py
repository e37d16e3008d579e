"""Sweep overlap metrics of degenerate predictors"""
import argparse

from batched_fmaps.commands.common import EXIT_OK, add_output_argument, open_output, report_error
from batched_fmaps.exceptions import FmapError
from batched_fmaps.services.metrics_service import MetricsService

NAME = "metrics-sweep"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Evaluate all metrics of Zeros/Ones/Random over the overlap ratio")
    parser.add_argument("--n", dest="total", type=float, default=1000.0, help="Region size N")
    parser.add_argument("--steps", type=int, default=101, help="Grid points on [0, 1]")
    parser.add_argument("--probability", type=float, default=0.5, help="Positive rate of the Random predictor")
    add_output_argument(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Write the sweep as CSV

    Args:
        args (argparse.Namespace): Parsed arguments

    Returns:
        int: 0 on success, 2 on invalid arguments or an unwritable path
    """
    service = MetricsService()
    try:
        rows = service.sweep(args.total, args.steps, args.probability)
        with open_output(args.out) as stream:
            service.write_sweep(rows, stream)
    except (FmapError, OSError) as e:
        return report_error(NAME, e)

    return EXIT_OK
