"""Arguments and helpers shared by the command modules."""
import argparse
import logging
import sys
from contextlib import contextmanager
from typing import Generator, TextIO

from batched_fmaps.config import (
    BENCH_MEM_CAP_BYTES,
    BENCH_REPETITIONS,
    BENCH_WARMUP,
    FMAP_DEFAULT_LAMBDA,
    FMAP_RESOLVENT_SIGMA,
)
from batched_fmaps.services.bench_service import BenchConfig, MaskKind, Precision

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="Output CSV path (standard output when omitted)")


def add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags of the k sweep, the synthetic instances and the solver settings."""
    parser.add_argument("--k-start", type=int, default=20, help="First spectral resolution")
    parser.add_argument("--k-stop", type=int, default=300, help="Last spectral resolution (inclusive)")
    parser.add_argument("--k-step", type=int, default=10, help="Step of the k sweep")
    parser.add_argument("--d", type=int, default=None, help="Descriptor channels (default 2k)")
    parser.add_argument("--batch", type=int, default=1, help="Shape pairs solved together")
    parser.add_argument("--lambda", dest="lam", type=float, default=FMAP_DEFAULT_LAMBDA,
                        help="Regularization weight")
    add_mask_arguments(parser)
    parser.add_argument("--reps", type=int, default=BENCH_REPETITIONS, help="Timed repetitions")
    parser.add_argument("--warmup", type=int, default=BENCH_WARMUP, help="Discarded warmup calls")
    parser.add_argument("--seed", type=int, default=0, help="Seed of the synthetic instances")
    add_precision_argument(parser)
    parser.add_argument("--mem-cap-bytes", type=int, default=BENCH_MEM_CAP_BYTES,
                        help="Largest batched left-hand side to allocate (0 disables the cap)")
    add_output_argument(parser)


def add_mask_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mask", choices=[kind.value for kind in MaskKind], default=MaskKind.COMMUTATIVITY.value,
                        help="Penalty mask family")
    parser.add_argument("--sigma", type=float, default=FMAP_RESOLVENT_SIGMA, help="Resolvent mask offset")


def add_precision_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--precision", choices=[p.value for p in Precision], default=Precision.F64.value,
                        help="Working precision")


def bench_config_from_args(args: argparse.Namespace) -> BenchConfig:
    """Build a validated BenchConfig from parsed sweep arguments."""
    return BenchConfig(
        k_start=args.k_start,
        k_stop=args.k_stop,
        k_step=args.k_step,
        d=args.d,
        batch=args.batch,
        lam=args.lam,
        mask_kind=MaskKind(args.mask),
        sigma=args.sigma,
        repetitions=args.reps,
        warmup=args.warmup,
        seed=args.seed,
        precision=Precision(args.precision),
        mem_cap_bytes=args.mem_cap_bytes or None,
    )


@contextmanager
def open_output(path: str | None) -> Generator[TextIO, None, None]:
    """Yield the file at `path` opened for writing, or standard output."""
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", newline="", encoding="utf-8") as stream:
        yield stream


def report_error(command: str, error: Exception) -> int:
    """Log a failed command with any attached notes and return the error exit code."""
    notes = getattr(error, "__notes__", [])
    detail = f" ({'; '.join(notes)})" if notes else ""
    logging.error(f"{command}: {type(error).__name__}: {error}{detail}")
    return EXIT_ERROR
