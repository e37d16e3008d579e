"""Penalty masks and the regularized functional map solvers.

The normal equations C AA^T + lam (M * C) = BA^T decouple into one k x k system
per row of C. `solve_rowwise` solves them one after another, `solve_batched`
stacks them into a [b, k, k, k] tensor and factors the whole stack with a
batched Cholesky decomposition, and `solve_full_oracle` assembles the k^2 x k^2
vectorized system for cross-checking.
"""
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, DTypeLike

from batched_fmaps.config import (
    FMAP_BATCHED_PARALLEL_MIN_K,
    FMAP_BATCHED_WORKERS,
    FMAP_ORACLE_MAX_K,
    FMAP_RESOLVENT_SIGMA,
)
from batched_fmaps.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    MemoryCapExceededError,
    OracleSizeError,
    SingularSystemError,
)
from batched_fmaps.spectral import Array, FunctionalMap, Spectrum, as_array

SolverName = Literal["rowwise", "batched", "oracle"]
SOLVER_NAMES: tuple[SolverName, ...] = ("rowwise", "batched", "oracle")
SUBSTITUTION_BLOCK = 32


@dataclass(frozen=True)
class PenaltyMask:
    """Entry-wise non-negative weights on C, k x k."""
    values: Array

    def __post_init__(self) -> None:
        values = np.array(self.values, copy=True)
        if not np.issubdtype(values.dtype, np.floating):
            values = values.astype(np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DimensionMismatchError(f"penalty mask must be square, got {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidParameterError("penalty mask entries must be finite and non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class SolveReport:
    """Result of one solver call.

    `values` is k x k for a single instance or b x k x k for a stack;
    `residual_norm` is the largest per-instance stationarity residual.
    """
    values: Array
    residual_norm: float
    wall_time: float
    peak_extra_bytes: int
    solver: SolverName

    @property
    def map(self) -> FunctionalMap:
        if self.values.ndim != 2:
            raise DimensionMismatchError("report holds a stack of maps; use `maps`")
        return FunctionalMap(self.values)

    @property
    def maps(self) -> list[FunctionalMap]:
        stack = self.values if self.values.ndim == 3 else self.values[None]
        return [FunctionalMap(c) for c in stack]


def _eigenvalue_vector(values: Spectrum | ArrayLike, name: str) -> Array:
    vector = values.eigenvalues if isinstance(values, Spectrum) else np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise DimensionMismatchError(f"{name} must be a vector, got shape {vector.shape}")
    if np.any(vector < 0):
        raise InvalidParameterError(f"{name} must be non-negative")
    return vector


def mask_commutativity(lambda1: Spectrum | ArrayLike, lambda2: Spectrum | ArrayLike) -> PenaltyMask:
    """Laplacian commutativity mask M(i, j) = (lambda2[i] - lambda1[j])^2.

    Args:
        lambda1: Eigenvalues of the source shape
        lambda2: Eigenvalues of the target shape

    Returns:
        k x k penalty mask
    """
    ev1 = _eigenvalue_vector(lambda1, "lambda1")
    ev2 = _eigenvalue_vector(lambda2, "lambda2")
    if ev1.size != ev2.size:
        raise DimensionMismatchError(f"spectra lengths differ: {ev1.size} vs {ev2.size}")
    return PenaltyMask(np.square(ev2[:, None] - ev1[None, :]))


def mask_resolvent(
        lambda1: Spectrum | ArrayLike,
        lambda2: Spectrum | ArrayLike,
        sigma: float = FMAP_RESOLVENT_SIGMA,
) -> PenaltyMask:
    """Resolvent mask: squared modulus of the difference of complex resolvents.

    Eigenvalues are divided by the larger of the two spectral maxima. With
    mu = lambda / lambda_max and r(mu) = (mu + i sigma) / (mu^2 + sigma^2),
    M(i, j) = |r(mu2[i]) - r(mu1[j])|^2.

    Args:
        lambda1: Eigenvalues of the source shape
        lambda2: Eigenvalues of the target shape
        sigma: Positive resolvent offset

    Returns:
        k x k penalty mask
    """
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    ev1 = _eigenvalue_vector(lambda1, "lambda1")
    ev2 = _eigenvalue_vector(lambda2, "lambda2")
    if ev1.size != ev2.size:
        raise DimensionMismatchError(f"spectra lengths differ: {ev1.size} vs {ev2.size}")

    scale = max(float(ev1.max()), float(ev2.max()))
    if scale == 0:
        raise InvalidParameterError("resolvent mask needs at least one positive eigenvalue")
    mu1, mu2 = ev1 / scale, ev2 / scale

    denom1 = np.square(mu1) + sigma ** 2
    denom2 = np.square(mu2) + sigma ** 2
    re = (mu2 / denom2)[:, None] - (mu1 / denom1)[None, :]
    im = (sigma / denom2)[:, None] - (sigma / denom1)[None, :]
    return PenaltyMask(np.square(re) + np.square(im))


def estimate_extra_bytes(k: int, batch: int, itemsize: int, solver: SolverName) -> int:
    """Transient allocation of one solve beyond the inputs and the output.

    rowwise keeps one k x k system per instance live, batched materializes the
    diagonal-embedded [b, k, k, k] left-hand side, and the oracle a k^2 x k^2 matrix.
    """
    if solver == "rowwise":
        return batch * k ** 2 * itemsize
    if solver == "batched":
        return batch * k ** 3 * itemsize
    if solver == "oracle":
        return batch * k ** 4 * itemsize
    raise InvalidParameterError(f"Unknown solver: {solver}")


def _prepare(
        a: ArrayLike, b: ArrayLike, m: PenaltyMask | ArrayLike, lam: float, dtype: DTypeLike
) -> tuple[Array, Array, Array, bool]:
    """Validate inputs and lift them to stacks: A, B -> [b, k, d], M -> [b, k, k]."""
    if lam < 0:
        raise InvalidParameterError(f"lambda must be non-negative, got {lam}")
    a_arr = np.asarray(as_array(a), dtype=dtype)
    b_arr = np.asarray(as_array(b), dtype=dtype)
    m_arr = np.asarray(m.values if isinstance(m, PenaltyMask) else m, dtype=dtype)

    single = a_arr.ndim == 2
    if single:
        a_arr, b_arr = a_arr[None], b_arr[None]
    if a_arr.ndim != 3 or b_arr.shape != a_arr.shape:
        raise DimensionMismatchError(
            f"A and B must share shape k x d (or b x k x d), got {a_arr.shape} and {b_arr.shape}"
        )
    batch, k, _ = a_arr.shape
    if m_arr.ndim == 2:
        m_arr = np.broadcast_to(m_arr, (batch, *m_arr.shape))
    if m_arr.shape != (batch, k, k):
        raise DimensionMismatchError(f"M must be {k} x {k} (or {batch} x {k} x {k}), got {m_arr.shape}")
    if np.any(m_arr < 0):
        raise InvalidParameterError("penalty mask entries must be non-negative")
    return a_arr, b_arr, m_arr, single


def _find_singular_row(gram: Array, mask: Array, lam: float) -> tuple[int, int] | None:
    """First (instance, row) whose system AA^T + lam diag(m_i) is singular, if any.

    The sum of two PSD matrices is singular exactly when a null vector of AA^T
    also vanishes on every coordinate the mask row lifts.
    """
    k = gram.shape[-1]
    eps = np.finfo(gram.dtype).eps
    for index in range(gram.shape[0]):
        eigvals = np.linalg.eigvalsh(gram[index])
        tol = k * eps * max(float(eigvals[-1]), 0.0)
        if eigvals[0] > tol:
            continue
        eigvals, eigvecs = np.linalg.eigh(gram[index])
        null_space = eigvecs[:, eigvals <= tol]
        for row in range(k):
            lifted = lam * mask[index, row] > 0
            if not np.any(lifted):
                return index, row
            if np.linalg.matrix_rank(null_space[lifted, :]) < null_space.shape[1]:
                return index, row
    return None


def _raise_if_singular(gram: Array, mask: Array, lam: float, ridge: float) -> None:
    if ridge > 0:
        return
    hit = _find_singular_row(gram, mask, lam)
    if hit is not None:
        index, row = hit
        raise SingularSystemError(row, f"instance {index}: AA^T + lambda*diag(m_{row}) has a null space")


def _residuals(c: Array, gram: Array, rhs: Array, mask: Array, lam: float) -> Array:
    """Per-instance ||C AA^T + lam (M * C) - BA^T||_F for stacks."""
    residual = c @ gram + lam * (mask * c) - rhs
    return np.sqrt(np.sum(np.square(residual, dtype=np.float64), axis=(-2, -1)))


def _finish(
        c: Array, gram: Array, rhs: Array, mask: Array, lam: float, single: bool,
        start: float, extra_bytes: int, solver: SolverName,
) -> SolveReport:
    wall_time = time.perf_counter() - start
    if not np.all(np.isfinite(c)):
        bad = np.argwhere(~np.isfinite(c))[0]
        raise SingularSystemError(int(bad[-2]), "solution has non-finite entries")
    residual = float(np.max(_residuals(c, gram, rhs, mask, lam)))
    logging.debug(
        f"{solver}: k={c.shape[-1]}, batch={c.shape[0]}, dtype={c.dtype}, "
        f"residual={residual:.3e}, extra_bytes={extra_bytes}"
    )
    return SolveReport(
        values=c[0] if single else c,
        residual_norm=residual,
        wall_time=wall_time,
        peak_extra_bytes=extra_bytes,
        solver=solver,
    )


def solve_rowwise(
        a: ArrayLike,
        b: ArrayLike,
        m: PenaltyMask | ArrayLike,
        lam: float,
        *,
        ridge: float = 0.0,
        dtype: DTypeLike = np.float64,
        check_singular: bool = True,
) -> SolveReport:
    """Solve the regularized functional map one row system at a time.

    For every row i, (AA^T + lam diag(m_i)) c_i = (BA^T)_i is solved on its own
    and C is assembled row by row.

    Args:
        a: k x d (or b x k x d) source descriptors
        b: target descriptors, same shape as `a`
        m: k x k penalty mask, or a b x k x k stack
        lam: Non-negative regularization weight
        ridge: Optional ridge added to every system's diagonal (off by default)
        dtype: Working precision (float64 or float32)
        check_singular: Run the null-space test before solving

    Returns:
        SolveReport with the map(s) and diagnostics

    Raises:
        SingularSystemError: If a row system is singular; `row` names it
    """
    a_arr, b_arr, m_arr, single = _prepare(a, b, m, lam, dtype)
    batch, k, _ = a_arr.shape
    start = time.perf_counter()

    a_t = a_arr.swapaxes(-1, -2)
    gram = a_arr @ a_t
    rhs = b_arr @ a_t
    if check_singular:
        _raise_if_singular(gram, m_arr, lam, ridge)

    c = np.empty_like(rhs)
    ridge_eye = ridge * np.eye(k, dtype=gram.dtype) if ridge > 0 else None
    for index in range(batch):
        for row in range(k):
            lhs = gram[index] + lam * np.diag(m_arr[index, row])
            if ridge_eye is not None:
                lhs += ridge_eye
            try:
                c[index, row] = np.linalg.solve(lhs, rhs[index, row])
            except np.linalg.LinAlgError as e:
                raise SingularSystemError(row, f"instance {index}: {e}") from e

    extra = estimate_extra_bytes(k, batch, gram.dtype.itemsize, "rowwise")
    return _finish(c, gram, rhs, m_arr, lam, single, start, extra, "rowwise")


def _cholesky_substitute(factor: Array, rhs: Array) -> Array:
    """Solve L L^T x = rhs for stacks of lower Cholesky factors [..., k, k].

    Forward and back substitution run a block of columns at a time, so the
    Python-level loop has ceil(k / SUBSTITUTION_BLOCK) steps per sweep.
    """
    k = factor.shape[-1]
    starts = range(0, k, SUBSTITUTION_BLOCK)
    y = np.empty_like(rhs)
    for s in starts:
        e = min(s + SUBSTITUTION_BLOCK, k)
        t = rhs[..., s:e]
        if s:
            t = t - (factor[..., s:e, :s] @ y[..., :s, None])[..., 0]
        y[..., s:e] = np.linalg.solve(factor[..., s:e, s:e], t[..., None])[..., 0]

    x = np.empty_like(rhs)
    for s in reversed(starts):
        e = min(s + SUBSTITUTION_BLOCK, k)
        t = y[..., s:e]
        if e < k:
            t = t - (factor[..., e:, s:e].swapaxes(-1, -2) @ x[..., e:, None])[..., 0]
        x[..., s:e] = np.linalg.solve(factor[..., s:e, s:e].swapaxes(-1, -2), t[..., None])[..., 0]
    return x


def _solve_row_block(lhs: Array, rhs: Array) -> Array:
    """Factor lhs[b, rows, k, k] in place and solve against rhs[b, rows, k].

    A block that is not numerically positive definite is left untouched and
    solved with pivoted LU instead.
    """
    try:
        lhs[...] = np.linalg.cholesky(lhs)
    except np.linalg.LinAlgError:
        return np.linalg.solve(lhs, rhs[..., None])[..., 0]
    return _cholesky_substitute(lhs, rhs)


def _row_blocks(k: int, workers: int) -> list[slice]:
    bounds = np.linspace(0, k, workers + 1).astype(int)
    return [slice(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def solve_batched(
        a: ArrayLike,
        b: ArrayLike,
        m: PenaltyMask | ArrayLike,
        lam: float,
        *,
        ridge: float = 0.0,
        dtype: DTypeLike = np.float64,
        mem_cap_bytes: int | None = None,
        check_singular: bool = True,
        workers: int | None = None,
) -> SolveReport:
    """Solve every row system of every instance through one batched code path.

    Builds Lhs = AA^T[:, None] + lam * diag_embed(M) with shape [b, k, k, k] in
    a single contiguous buffer. Each system is symmetric positive definite for
    lam >= 0, so the stack is Cholesky-factored in place (the leading two axes
    are batch axes) and solved by blocked substitution. For k at or above
    FMAP_BATCHED_PARALLEL_MIN_K the rows are split into contiguous blocks that
    are factored on a thread pool; every system is still factored on its own,
    so the result does not depend on the number of workers.

    Args:
        a: k x d (or b x k x d) source descriptors
        b: target descriptors, same shape as `a`
        m: k x k penalty mask, or a b x k x k stack
        lam: Non-negative regularization weight
        ridge: Optional ridge added to every system's diagonal (off by default)
        dtype: Working precision (float64 or float32)
        mem_cap_bytes: Refuse to allocate a left-hand side larger than this
        check_singular: Run the null-space test before solving
        workers: Threads factoring row blocks; the configured default when omitted

    Returns:
        SolveReport with the map(s) and diagnostics; `peak_extra_bytes` is the
        size of the embedded left-hand side as allocated

    Raises:
        MemoryCapExceededError: Before allocating, if the tensor exceeds the cap
        SingularSystemError: If a row system is singular; `row` names it
    """
    a_arr, b_arr, m_arr, single = _prepare(a, b, m, lam, dtype)
    batch, k, _ = a_arr.shape
    expected = estimate_extra_bytes(k, batch, np.dtype(dtype).itemsize, "batched")
    if mem_cap_bytes is not None and expected > mem_cap_bytes:
        raise MemoryCapExceededError(expected, mem_cap_bytes)
    if workers is None:
        workers = FMAP_BATCHED_WORKERS if k >= FMAP_BATCHED_PARALLEL_MIN_K else 1
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")

    start = time.perf_counter()
    a_t = a_arr.swapaxes(-1, -2)
    gram = a_arr @ a_t
    rhs = b_arr @ a_t
    if check_singular:
        _raise_if_singular(gram, m_arr, lam, ridge)

    lhs = np.empty((batch, k, k, k), dtype=gram.dtype)
    lhs[...] = gram[:, None, :, :]
    # [b, i, j, j] viewed through the flattened trailing k x k block
    diagonal = lhs.reshape(batch, k, k * k)[..., :: k + 1]
    diagonal += lam * m_arr
    if ridge > 0:
        diagonal += ridge

    try:
        blocks = _row_blocks(k, min(workers, k))
        if len(blocks) == 1:
            c = _solve_row_block(lhs, rhs)
        else:
            c = np.empty_like(rhs)
            with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
                solved = pool.map(lambda rows: _solve_row_block(lhs[:, rows], rhs[:, rows]), blocks)
                for rows, values in zip(blocks, solved):
                    c[:, rows] = values
    except np.linalg.LinAlgError as e:
        # Blocks that failed keep their assembled systems; factored blocks never raise here
        for index in range(batch):
            for row in range(k):
                try:
                    np.linalg.solve(lhs[index, row], rhs[index, row])
                except np.linalg.LinAlgError:
                    raise SingularSystemError(row, f"instance {index}: {e}") from e
        raise SingularSystemError(None, str(e)) from e

    return _finish(c, gram, rhs, m_arr, lam, single, start, lhs.nbytes, "batched")


def solve_full_oracle(
        a: ArrayLike,
        b: ArrayLike,
        m: PenaltyMask | ArrayLike,
        lam: float,
        *,
        max_k: int = FMAP_ORACLE_MAX_K,
        dtype: DTypeLike = np.float64,
) -> SolveReport:
    """Solve the fully vectorized k^2 x k^2 system; a correctness oracle.

    With C flattened row-major, vec(C AA^T) = (I_k kron (AA^T)^T) vec(C) and the
    mask term is diagonal, so the normal equations become one dense system that
    is handed to a general LU solve without exploiting any structure.

    Raises:
        OracleSizeError: If k exceeds `max_k`
        SingularSystemError: If the vectorized system is singular or numerically so
    """
    a_arr, b_arr, m_arr, single = _prepare(a, b, m, lam, dtype)
    batch, k, _ = a_arr.shape
    if k > max_k:
        raise OracleSizeError(k, max_k)

    start = time.perf_counter()
    a_t = a_arr.swapaxes(-1, -2)
    gram = a_arr @ a_t
    rhs = b_arr @ a_t
    identity = np.eye(k, dtype=gram.dtype)

    c = np.empty_like(rhs)
    for index in range(batch):
        system = np.kron(identity, gram[index].T) + lam * np.diag(m_arr[index].ravel())
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                solution = scipy.linalg.solve(system, rhs[index].ravel())
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as e:
                raise SingularSystemError(None, f"instance {index}: {e}") from e
        c[index] = solution.reshape(k, k)

    extra = estimate_extra_bytes(k, batch, gram.dtype.itemsize, "oracle")
    return _finish(c, gram, rhs, m_arr, lam, single, start, extra, "oracle")


def solve_fmap(
        a: ArrayLike,
        b: ArrayLike,
        m: PenaltyMask | ArrayLike,
        lam: float,
        method: SolverName = "batched",
        **kwargs,
) -> SolveReport:
    """Dispatch to one of the three solvers by name."""
    if method == "rowwise":
        return solve_rowwise(a, b, m, lam, **kwargs)
    if method == "batched":
        return solve_batched(a, b, m, lam, **kwargs)
    if method == "oracle":
        return solve_full_oracle(a, b, m, lam, **kwargs)
    raise InvalidParameterError(f"Unknown solver: {method}")


def check_stationarity(
        c: FunctionalMap | ArrayLike,
        a: ArrayLike,
        b: ArrayLike,
        m: PenaltyMask | ArrayLike,
        lam: float,
) -> float:
    """Residual ||C AA^T + lam (M * C) - BA^T||_F of the normal equations.

    Accepts single instances or stacks; for stacks the largest residual is returned.
    """
    c_arr = np.asarray(as_array(c))
    a_arr, b_arr, m_arr, single = _prepare(a, b, m, lam, c_arr.dtype)
    if single:
        c_arr = c_arr[None]
    batch, k, _ = a_arr.shape
    if c_arr.shape != (batch, k, k):
        raise DimensionMismatchError(f"C must be {k} x {k}, got {np.shape(as_array(c))}")
    a_t = a_arr.swapaxes(-1, -2)
    return float(np.max(_residuals(c_arr, a_arr @ a_t, b_arr @ a_t, m_arr, lam)))


def stationarity_tolerance(b: ArrayLike, a: ArrayLike, rel: float = 1e-8) -> float:
    """Residual bound rel * (1 + ||BA^T||_F) used to accept a solver output."""
    a_arr, b_arr = np.asarray(as_array(a)), np.asarray(as_array(b))
    return rel * (1.0 + float(np.linalg.norm(b_arr @ a_arr.swapaxes(-1, -2))))
