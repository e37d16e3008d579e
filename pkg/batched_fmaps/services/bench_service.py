"""Service for solver verification, runtime benchmarks and memory accounting."""
import logging
import os
import platform
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any

import numpy as np

from batched_fmaps.config import (
    BENCH_MEM_CAP_BYTES,
    BENCH_REPETITIONS,
    BENCH_WARMUP,
    FMAP_DEFAULT_LAMBDA,
    FMAP_RESOLVENT_SIGMA,
)
from batched_fmaps.exceptions import InvalidParameterError, MemoryCapExceededError
from batched_fmaps.fmap_solver import (
    PenaltyMask,
    check_stationarity,
    estimate_extra_bytes,
    mask_commutativity,
    mask_resolvent,
    solve_batched,
    solve_full_oracle,
    solve_rowwise,
)
from batched_fmaps.services.recording_service import RecordingService, RunStatus
from batched_fmaps.spectral import Spectrum
from batched_fmaps.synthetic import generate_batch
from batched_fmaps.utils import median_wall_time_ms

# Published single-map runtimes in ms on an i9-9900K + RTX 2080 Ti, keyed by k.
REFERENCE_RUNTIME_MS: dict[str, dict[int, float]] = {
    "rowwise": {
        20: 12.17, 25: 15.07, 30: 18.48, 35: 22.72, 40: 25.21, 45: 28.69, 50: 31.97, 55: 35.82,
        60: 40.18, 65: 43.63, 70: 48.44, 75: 53.05, 80: 57.80, 85: 63.27, 90: 67.57, 95: 72.38,
        100: 78.46, 105: 83.85, 110: 89.92, 115: 96.39, 120: 101.81, 125: 108.37, 130: 116.38,
        135: 122.57, 140: 129.47, 145: 138.17, 150: 163.79, 155: 152.70, 160: 156.01, 165: 168.68,
        170: 176.22, 175: 184.58, 180: 193.45, 185: 202.07, 190: 210.54, 195: 225.67, 200: 233.57,
        205: 243.60, 210: 253.21, 215: 263.23, 220: 273.46, 225: 283.69, 230: 293.98, 235: 303.98,
        240: 313.79, 245: 328.35, 250: 337.33, 255: 348.77, 260: 425.29, 265: 440.78, 270: 456.07,
        275: 473.56, 280: 487.10, 285: 503.61, 290: 520.57, 295: 535.24, 300: 551.43,
    },
    "batched": {
        20: 1.98, 30: 1.11, 40: 1.98, 50: 1.82, 60: 1.90, 70: 2.79, 80: 2.65, 90: 2.37, 100: 2.59,
        110: 2.80, 120: 2.96, 130: 3.89, 140: 3.85, 150: 4.33, 160: 4.45, 170: 5.23, 180: 5.57,
        190: 6.03, 200: 7.05, 210: 7.86, 220: 8.39, 230: 9.28, 240: 9.54, 250: 10.94, 260: 12.29,
        270: 13.47, 280: 14.66, 290: 16.53, 300: 17.46,
    },
}

ORACLE_VERIFY_MAX_K = 32

# Batched must not lose to the loop from SCALING_MIN_K on, and its speedup at the
# largest k must exceed the speedup at the first k >= SCALING_SMALL_K.
SCALING_MIN_K = 100
SCALING_SMALL_K = 50

BENCH_COLUMNS = (
    "k", "solver", "median_ms", "max_abs_diff", "peak_extra_bytes", "speedup", "reference_ms", "mem_cap_exceeded",
)
VERIFY_COLUMNS = ("k", "seed", "lambda", "pair", "max_abs_diff", "tolerance", "residual", "passed")
MEMORY_COLUMNS = (
    "k", "precision", "embedded_tensor_bytes", "loop_working_set_bytes", "ratio", "solver_reported_bytes",
)


class Precision(Enum):
    """Working precision of the solvers."""
    F32 = "f32"
    F64 = "f64"

    @property
    def dtype(self) -> type:
        return np.float32 if self is Precision.F32 else np.float64

    @property
    def tolerance(self) -> float:
        """Max-abs agreement required between solvers."""
        return 1e-3 if self is Precision.F32 else 1e-8

    @property
    def csv_digits(self) -> int:
        return 9 if self is Precision.F32 else 17


class MaskKind(Enum):
    """Penalty mask family."""
    COMMUTATIVITY = "comm"
    RESOLVENT = "resolvent"


@dataclass(frozen=True)
class BenchConfig:
    """Sweep and solver settings shared by verify, bench and memory."""
    k_start: int = 20
    k_stop: int = 300
    k_step: int = 10
    d: int | None = None
    batch: int = 1
    lam: float = FMAP_DEFAULT_LAMBDA
    mask_kind: MaskKind = MaskKind.COMMUTATIVITY
    sigma: float = FMAP_RESOLVENT_SIGMA
    repetitions: int = BENCH_REPETITIONS
    warmup: int = BENCH_WARMUP
    seed: int = 0
    precision: Precision = Precision.F64
    mem_cap_bytes: int | None = BENCH_MEM_CAP_BYTES

    def __post_init__(self) -> None:
        if self.k_start < 1 or self.k_start > self.k_stop:
            raise InvalidParameterError(f"need 1 <= k_start <= k_stop, got {self.k_start}..{self.k_stop}")
        if self.k_step < 1:
            raise InvalidParameterError(f"k_step must be >= 1, got {self.k_step}")
        if self.d is not None and self.d < 1:
            raise InvalidParameterError(f"d must be >= 1, got {self.d}")
        if self.batch < 1:
            raise InvalidParameterError(f"batch must be >= 1, got {self.batch}")
        if self.lam < 0:
            raise InvalidParameterError(f"lambda must be non-negative, got {self.lam}")
        if self.repetitions < 1 or self.warmup < 0:
            raise InvalidParameterError(
                f"need repetitions >= 1 and warmup >= 0, got {self.repetitions} and {self.warmup}"
            )

    def k_values(self) -> list[int]:
        return list(range(self.k_start, self.k_stop + 1, self.k_step))

    def as_dict(self) -> dict[str, Any]:
        values = asdict(self)
        values["mask_kind"] = self.mask_kind.value
        values["precision"] = self.precision.value
        return values


@dataclass(frozen=True)
class BenchRow:
    """Timing of one solver at one spectral resolution."""
    k: int
    solver: str
    median_ms: float | None
    max_abs_diff: float | None
    peak_extra_bytes: int
    speedup: float | None
    reference_ms: float | None
    mem_cap_exceeded: bool


@dataclass(frozen=True)
class VerifyRow:
    """Agreement of one solver pair (or one stationarity check) at one k."""
    k: int
    seed: int
    lam: float
    pair: str
    max_abs_diff: float | None
    tolerance: float
    residual: float | None
    passed: bool


@dataclass(frozen=True)
class MemoryRow:
    """Analytic allocation of the batched and row-wise paths at one k."""
    k: int
    precision: str
    embedded_tensor_bytes: int
    loop_working_set_bytes: int
    ratio: float
    solver_reported_bytes: int | None


def runtime_environment() -> dict[str, Any]:
    """Settings that change timings; written into every report header."""
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
        "cpu_count": os.cpu_count(),
        "OMP_NUM_THREADS": os.getenv("OMP_NUM_THREADS", ""),
        "OPENBLAS_NUM_THREADS": os.getenv("OPENBLAS_NUM_THREADS", ""),
        "MKL_NUM_THREADS": os.getenv("MKL_NUM_THREADS", ""),
    }


def build_mask_from_spectra(
        kind: MaskKind, spectrum1: Spectrum | np.ndarray, spectrum2: Spectrum | np.ndarray, sigma: float
) -> PenaltyMask:
    if kind is MaskKind.RESOLVENT:
        return mask_resolvent(spectrum1, spectrum2, sigma)
    return mask_commutativity(spectrum1, spectrum2)


def build_mask(config: BenchConfig, eigenvalues1: np.ndarray, eigenvalues2: np.ndarray) -> PenaltyMask:
    return build_mask_from_spectra(config.mask_kind, eigenvalues1, eigenvalues2, config.sigma)


# noinspection PyMethodMayBeStatic
class BenchService:
    """Runs the verify, bench and memory commands over a range of spectral resolutions."""

    def __init__(self, recording_service: RecordingService | None = None, record: bool = False) -> None:
        self.record = record
        self.recording_service = recording_service or (RecordingService() if record else None)

    def _instance(self, config: BenchConfig, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stacked descriptors and masks for `config.batch` pairs at resolution k."""
        a, b, instances = generate_batch(k, config.d, config.batch, config.seed)
        masks = np.stack([
            build_mask(config, inst.spectrum1.eigenvalues, inst.spectrum2.eigenvalues).values
            for inst in instances
        ])
        dtype = config.precision.dtype
        return a.astype(dtype), b.astype(dtype), masks.astype(dtype)

    def report_header(self, command: str, config: BenchConfig) -> list[str]:
        """Comment lines describing the protocol and environment of a report."""
        environment = runtime_environment()
        lines = [
            f"batched-fmaps {command}",
            "timing: time.perf_counter_ns (monotonic), median of repetitions, warmup calls discarded",
            "timing excludes instance generation and mask construction; CPU execution needs no device sync",
            "parallelism: whatever the BLAS/LAPACK backend uses for the thread settings below",
            "reference_ms: published runtimes measured on an i9-9900K + RTX 2080 Ti (informative only)",
            "config: " + ", ".join(f"{key}={value}" for key, value in config.as_dict().items()),
            "environment: " + ", ".join(f"{key}={value}" for key, value in environment.items()),
        ]
        return lines

    def _start_recording(self, command: str, config: BenchConfig) -> str | None:
        if not self.record or self.recording_service is None:
            return None
        return self.recording_service.start_run(command, config.as_dict(), runtime_environment())

    def _finish_recording(
            self, run_id: str | None, results: list[dict[str, Any]], status: RunStatus, error: str | None = None
    ) -> None:
        if run_id is None or self.recording_service is None:
            return
        if results:
            self.recording_service.record_results(run_id, results)
        self.recording_service.complete_run(run_id, status, error)

    def _residual_bound(
            self, c: np.ndarray, a: np.ndarray, b: np.ndarray, m: np.ndarray, config: BenchConfig
    ) -> float:
        """Largest acceptable stationarity residual over the stack.

        float64 uses tol * (1 + ||BA^T||_F). float32 rounding scales with every term of
        the equations, so its bound also includes ||C AA^T||_F and lam ||M * C||_F.
        """
        tolerance = config.precision.tolerance
        bounds = []
        for index in range(c.shape[0]):
            scale = 1.0 + float(np.linalg.norm(b[index] @ a[index].T))
            if config.precision is Precision.F32:
                scale += float(np.linalg.norm(c[index] @ (a[index] @ a[index].T)))
                scale += config.lam * float(np.linalg.norm(m[index] * c[index]))
            bounds.append(tolerance * scale)
        return max(bounds)

    def verify(self, config: BenchConfig, inject_fault: bool = False) -> tuple[list[VerifyRow], bool]:
        """Cross-check row-wise, batched and (for k <= 32) oracle outputs across the k range.

        Args:
            config: Sweep configuration
            inject_fault: Negate the first row of every batched output so the check must fail

        Returns:
            Rows of the comparison and whether every check passed
        """
        run_id = self._start_recording("verify", config)
        rows: list[VerifyRow] = []
        tolerance = config.precision.tolerance
        dtype = config.precision.dtype

        try:
            for k in config.k_values():
                a, b, masks = self._instance(config, k)
                try:
                    rowwise = solve_rowwise(a, b, masks, config.lam, dtype=dtype)
                    batched = solve_batched(
                        a, b, masks, config.lam, dtype=dtype, mem_cap_bytes=config.mem_cap_bytes
                    )
                    oracle = None
                    if k <= ORACLE_VERIFY_MAX_K:
                        oracle = solve_full_oracle(a, b, masks, config.lam, dtype=np.float64)
                except Exception as e:
                    logging.error(f"verify: solver failed at k={k}, seed={config.seed}: {e}", exc_info=True)
                    e.add_note(f"k={k}, seed={config.seed}")
                    raise

                batched_values = batched.values.copy()
                if inject_fault:
                    batched_values[:, 0, :] *= -1.0

                outputs = {"rowwise": rowwise.values, "batched": batched_values}
                if oracle is not None:
                    outputs["oracle"] = oracle.values
                names = list(outputs)
                for first in range(len(names)):
                    for second in range(first + 1, len(names)):
                        diff = float(np.max(np.abs(
                            outputs[names[first]].astype(np.float64) - outputs[names[second]].astype(np.float64)
                        )))
                        rows.append(VerifyRow(
                            k, config.seed, config.lam, f"{names[first]}-{names[second]}",
                            diff, tolerance, None, diff <= tolerance,
                        ))

                # Stationarity of each solver output against the float64 normal equations
                a64, b64, m64 = a.astype(np.float64), b.astype(np.float64), masks.astype(np.float64)
                for name, values in outputs.items():
                    values64 = values.astype(np.float64)
                    residual_bound = self._residual_bound(values64, a64, b64, m64, config)
                    residual = check_stationarity(values64, a64, b64, m64, config.lam)
                    rows.append(VerifyRow(
                        k, config.seed, config.lam, f"{name}-stationarity",
                        None, residual_bound, residual, residual <= residual_bound,
                    ))
                failed = [row.pair for row in rows if row.k == k and not row.passed]
                if failed:
                    logging.warning(f"verify: k={k} failed checks: {', '.join(failed)}")
                else:
                    logging.info(f"verify: k={k} passed")
        except Exception as e:
            self._finish_recording(run_id, [], RunStatus.FAILED, str(e))
            raise

        passed = all(row.passed for row in rows)
        self._finish_recording(run_id, [
            {"k": row.k, "solver": row.pair, "max_abs_diff": row.max_abs_diff, "flagged": not row.passed}
            for row in rows
        ], RunStatus.COMPLETED)
        return rows, passed

    def bench(self, config: BenchConfig) -> list[BenchRow]:
        """Time the row-wise and batched solvers at every k of the sweep.

        A batched solve above the memory cap yields a flagged row instead of aborting.
        """
        run_id = self._start_recording("bench", config)
        rows: list[BenchRow] = []
        dtype = config.precision.dtype

        try:
            for k in config.k_values():
                a, b, masks = self._instance(config, k)
                reference = solve_rowwise(a, b, masks, config.lam, dtype=dtype)
                rowwise_ms = median_wall_time_ms(
                    lambda: solve_rowwise(a, b, masks, config.lam, dtype=dtype),
                    config.repetitions, config.warmup,
                )
                rows.append(BenchRow(
                    k, "rowwise", rowwise_ms, 0.0, reference.peak_extra_bytes, 1.0,
                    REFERENCE_RUNTIME_MS["rowwise"].get(k), False,
                ))

                batched_bytes = estimate_extra_bytes(k, config.batch, np.dtype(dtype).itemsize, "batched")
                try:
                    batched = solve_batched(
                        a, b, masks, config.lam, dtype=dtype, mem_cap_bytes=config.mem_cap_bytes
                    )
                except MemoryCapExceededError as e:
                    logging.warning(f"bench: k={k} batched solve skipped: {e}")
                    rows.append(BenchRow(
                        k, "batched", None, None, batched_bytes, None,
                        REFERENCE_RUNTIME_MS["batched"].get(k), True,
                    ))
                    continue

                batched_ms = median_wall_time_ms(
                    lambda: solve_batched(a, b, masks, config.lam, dtype=dtype),
                    config.repetitions, config.warmup,
                )
                diff = float(np.max(np.abs(batched.values - reference.values)))
                speedup = rowwise_ms / batched_ms
                rows.append(BenchRow(
                    k, "batched", batched_ms, diff, batched.peak_extra_bytes, speedup,
                    REFERENCE_RUNTIME_MS["batched"].get(k), False,
                ))
                logging.info(
                    f"bench: k={k} rowwise={rowwise_ms:.3f} ms batched={batched_ms:.3f} ms speedup={speedup:.1f}x"
                )
        except Exception as e:
            logging.error(f"bench: failed with seed={config.seed}: {e}", exc_info=True)
            self._finish_recording(run_id, [], RunStatus.FAILED, str(e))
            raise

        self._finish_recording(run_id, [
            {
                "k": row.k, "solver": row.solver, "median_ms": row.median_ms, "max_abs_diff": row.max_abs_diff,
                "peak_extra_bytes": row.peak_extra_bytes, "flagged": row.mem_cap_exceeded,
            }
            for row in rows
        ], RunStatus.COMPLETED)
        return rows

    def scaling_check(self, rows: list[BenchRow]) -> list[str]:
        """Failures of the batching payoff checks on timed bench rows; empty when both hold.

        Rows without a timing (memory cap) are ignored, and a check whose k values
        the sweep does not cover is skipped.
        """
        timed = sorted((row for row in rows if row.solver == "batched" and row.speedup is not None),
                       key=lambda row: row.k)
        failures = [
            f"k={row.k}: batched {row.median_ms:.3f} ms is slower than rowwise (speedup {row.speedup:.2f}x)"
            for row in timed
            if row.k >= SCALING_MIN_K and row.speedup < 1.0
        ]
        anchors = [row for row in timed if row.k >= SCALING_SMALL_K]
        if len(anchors) >= 2 and anchors[-1].k >= SCALING_MIN_K:
            small, large = anchors[0], anchors[-1]
            if large.speedup <= small.speedup:
                failures.append(
                    f"speedup does not grow with k: {large.speedup:.2f}x at k={large.k} "
                    f"vs {small.speedup:.2f}x at k={small.k}"
                )
        for failure in failures:
            logging.warning(f"bench: scaling check failed: {failure}")
        return failures

    def memory(self, config: BenchConfig, cross_check: bool = True) -> list[MemoryRow]:
        """Analytic extra allocation of the batched path versus the loop, in both precisions.

        With `cross_check`, the batched solver is run (when under the cap) and its
        reported transient bytes are included for comparison.
        """
        rows: list[MemoryRow] = []
        for k in config.k_values():
            for precision in (Precision.F32, Precision.F64):
                itemsize = np.dtype(precision.dtype).itemsize
                embedded = estimate_extra_bytes(k, config.batch, itemsize, "batched")
                loop = estimate_extra_bytes(k, config.batch, itemsize, "rowwise")
                reported: int | None = None
                if cross_check and (config.mem_cap_bytes is None or embedded <= config.mem_cap_bytes):
                    a, b, masks = self._instance(config, k)
                    reported = solve_batched(a, b, masks, config.lam, dtype=precision.dtype).peak_extra_bytes
                rows.append(MemoryRow(k, precision.value, embedded, loop, embedded / loop, reported))
        return rows
