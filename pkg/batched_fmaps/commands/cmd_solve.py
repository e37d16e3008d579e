"""Solve one functional map from CSV inputs"""
import argparse
import logging

import numpy as np

from batched_fmaps.commands.common import (
    EXIT_OK,
    add_mask_arguments,
    add_output_argument,
    add_precision_argument,
    open_output,
    report_error,
)
from batched_fmaps.config import FMAP_DEFAULT_LAMBDA
from batched_fmaps.exceptions import FmapError
from batched_fmaps.fmap_solver import SOLVER_NAMES, solve_fmap
from batched_fmaps.matrix_io import read_matrix_csv, read_vector_csv, write_matrix_csv
from batched_fmaps.services.bench_service import MaskKind, Precision, build_mask_from_spectra
from batched_fmaps.spectral import Spectrum

NAME = "solve"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Solve for C from descriptor and eigenvalue CSV files")
    parser.add_argument("--a", dest="a_path", required=True, help="Source spectral descriptors, k x d")
    parser.add_argument("--b", dest="b_path", required=True, help="Target spectral descriptors, k x d")
    parser.add_argument("--eval1", required=True, help="Source eigenvalues, one per line")
    parser.add_argument("--eval2", required=True, help="Target eigenvalues, one per line")
    parser.add_argument("--lambda", dest="lam", type=float, default=FMAP_DEFAULT_LAMBDA,
                        help="Regularization weight")
    add_mask_arguments(parser)
    parser.add_argument("--solver", choices=SOLVER_NAMES, default="batched", help="Solver to use")
    add_precision_argument(parser)
    add_output_argument(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Load the inputs, solve and write C

    Args:
        args (argparse.Namespace): Parsed arguments

    Returns:
        int: 0 on success, 2 on unreadable input or a solver error
    """
    precision = Precision(args.precision)
    try:
        a = read_matrix_csv(args.a_path)
        b = read_matrix_csv(args.b_path)
        spectrum1 = Spectrum(read_vector_csv(args.eval1))
        spectrum2 = Spectrum(read_vector_csv(args.eval2))
        mask = build_mask_from_spectra(MaskKind(args.mask), spectrum1, spectrum2, args.sigma)
        dtype = np.float64 if args.solver == "oracle" else precision.dtype
        report = solve_fmap(a, b, mask, args.lam, method=args.solver, dtype=dtype)
        logging.info(
            f"solve: k={mask.k}, solver={report.solver}, residual={report.residual_norm:.3e}, "
            f"wall_time={report.wall_time * 1e3:.3f} ms"
        )
        with open_output(args.out) as stream:
            write_matrix_csv(stream, report.values, digits=precision.csv_digits)
    except (FmapError, OSError) as e:
        return report_error(NAME, e)

    return EXIT_OK
