"""Check the algebra of the gradient-feature variants"""
import argparse
from dataclasses import astuple

from batched_fmaps.commands.common import EXIT_CHECK_FAILED, EXIT_OK, add_output_argument, open_output, report_error
from batched_fmaps.exceptions import FmapError
from batched_fmaps.services.gradfeat_service import GRADFEAT_COLUMNS, GradFeatConfig, GradFeatService
from batched_fmaps.utils import write_csv_report

NAME = "gradfeat-check"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Run block-form, frame-invariance and coincidence checks")
    parser.add_argument("--d", dest="channels", type=int, default=8, help="Feature channels D")
    parser.add_argument("--v", dest="vertices", type=int, default=64, help="Vertices V")
    parser.add_argument("--seed", type=int, default=0, help="Seed of the random draws")
    parser.add_argument("--trials", type=int, default=100, help="Random draws per check")
    add_output_argument(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Run every check and write one row per check

    Args:
        args (argparse.Namespace): Parsed arguments

    Returns:
        int: 0 if all checks pass, 1 if one fails, 2 on invalid arguments
    """
    try:
        config = GradFeatConfig(channels=args.channels, vertices=args.vertices, seed=args.seed, trials=args.trials)
        checks, passed = GradFeatService().run_checks(config)
        with open_output(args.out) as stream:
            write_csv_report(stream, GRADFEAT_COLUMNS, (astuple(check) for check in checks))
    except (FmapError, OSError) as e:
        return report_error(NAME, e)

    return EXIT_OK if passed else EXIT_CHECK_FAILED
