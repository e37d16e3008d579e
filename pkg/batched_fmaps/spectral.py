"""Spectral data types, descriptor projection and the functional map energy."""
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from batched_fmaps.config import FMAP_PINV_COND_THRESHOLD
from batched_fmaps.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    RankDeficientError,
)

Array = NDArray[np.floating]


def _frozen_array(values: ArrayLike, ndim: int, name: str) -> Array:
    """Copy `values` into a read-only floating array of the given rank."""
    array = np.array(values, copy=True)
    if not np.issubdtype(array.dtype, np.floating):
        array = array.astype(np.float64)
    if array.ndim != ndim:
        raise DimensionMismatchError(f"{name} must be {ndim}-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidParameterError(f"{name} has non-finite entries")
    array.setflags(write=False)
    return array


def as_array(value: "ArrayLike | VertexFeatures | SpectralDescriptors | FunctionalMap") -> Array:
    """Unwrap a spectral container to its array, or convert an array-like."""
    if isinstance(value, (VertexFeatures, SpectralDescriptors, FunctionalMap)):
        return value.values
    array = np.asarray(value)
    if not np.issubdtype(array.dtype, np.floating):
        array = array.astype(np.float64)
    return array


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending, non-negative) and optional eigenbasis of one shape's Laplacian."""
    eigenvalues: Array
    basis: Array | None = None

    def __post_init__(self) -> None:
        eigenvalues = _frozen_array(self.eigenvalues, 1, "eigenvalues")
        if eigenvalues.size == 0:
            raise DimensionMismatchError("eigenvalues must not be empty")
        if eigenvalues[0] < 0:
            raise InvalidParameterError(f"eigenvalues[0] must be >= 0, got {eigenvalues[0]}")
        if np.any(np.diff(eigenvalues) < 0):
            raise InvalidParameterError("eigenvalues must be sorted ascending")
        object.__setattr__(self, "eigenvalues", eigenvalues)

        if self.basis is not None:
            basis = _frozen_array(self.basis, 2, "basis")
            if basis.shape[1] != eigenvalues.size:
                raise DimensionMismatchError(
                    f"basis has {basis.shape[1]} columns but there are {eigenvalues.size} eigenvalues"
                )
            object.__setattr__(self, "basis", basis)

    @property
    def k(self) -> int:
        return int(self.eigenvalues.size)


@dataclass(frozen=True)
class VertexFeatures:
    """Per-vertex descriptors, V x d."""
    values: Array

    def __post_init__(self) -> None:
        values = _frozen_array(self.values, 2, "features")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise DimensionMismatchError(f"features must be at least 1x1, got {values.shape}")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SpectralDescriptors:
    """Descriptors expressed in a spectral basis, k x d."""
    values: Array

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values, 2, "descriptors"))

    @property
    def k(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class FunctionalMap:
    """A square k x k functional map."""
    values: Array

    def __post_init__(self) -> None:
        values = _frozen_array(self.values, 2, "functional map")
        if values.shape[0] != values.shape[1]:
            raise DimensionMismatchError(f"functional map must be square, got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return int(self.values.shape[0])


def project_to_spectral(
        basis: ArrayLike,
        features: VertexFeatures | ArrayLike,
        method: Literal["auto", "normal", "lstsq"] = "auto",
        cond_threshold: float = FMAP_PINV_COND_THRESHOLD,
) -> SpectralDescriptors:
    """Project per-vertex features onto a basis with the Moore-Penrose pseudo-inverse.

    Plain Euclidean projection; no mass matrix is involved.

    Args:
        basis: V x k basis with full column rank
        features: V x d per-vertex features
        method: "normal" solves the normal equations, "lstsq" uses a rank-revealing
            least-squares factorization, "auto" picks normal equations while the Gram
            matrix condition number stays below `cond_threshold`
        cond_threshold: Condition number above which "auto" falls back to "lstsq"

    Returns:
        k x d spectral descriptors

    Raises:
        DimensionMismatchError: If the row counts of basis and features differ
        RankDeficientError: If the basis does not have full column rank
    """
    phi = as_array(basis)
    feats = as_array(features)
    if phi.ndim != 2 or feats.ndim != 2:
        raise DimensionMismatchError(f"basis and features must be 2-D, got {phi.shape} and {feats.shape}")
    if phi.shape[0] != feats.shape[0]:
        raise DimensionMismatchError(
            f"basis has {phi.shape[0]} rows but features have {feats.shape[0]}"
        )
    if method not in ("auto", "normal", "lstsq"):
        raise InvalidParameterError(f"Unknown projection method: {method}")

    k = phi.shape[1]
    rank = int(np.linalg.matrix_rank(phi))
    if rank < k:
        raise RankDeficientError(rank, k)

    gram = phi.T @ phi
    if method == "auto":
        method = "normal" if np.linalg.cond(gram) < cond_threshold else "lstsq"
    logging.debug(f"project_to_spectral: basis {phi.shape}, features {feats.shape}, method {method}")

    if method == "normal":
        coefficients = scipy.linalg.solve(gram, phi.T @ feats, assume_a="pos")
    else:
        coefficients, _, _, _ = scipy.linalg.lstsq(phi, feats)

    return SpectralDescriptors(coefficients)


def _check_energy_shapes(c: Array, a: Array, b: Array, m: Array) -> None:
    k = c.shape[0]
    if c.ndim != 2 or c.shape != (k, k):
        raise DimensionMismatchError(f"C must be square, got {c.shape}")
    if a.ndim != 2 or b.shape != a.shape or a.shape[0] != k:
        raise DimensionMismatchError(f"A and B must both be {k} x d, got {a.shape} and {b.shape}")
    if m.shape != (k, k):
        raise DimensionMismatchError(f"M must be {k} x {k}, got {m.shape}")


def energy(
        c: FunctionalMap | ArrayLike,
        a: SpectralDescriptors | ArrayLike,
        b: SpectralDescriptors | ArrayLike,
        m: ArrayLike,
        lam: float,
) -> float:
    """Regularized functional map energy ||CA - B||_F^2 + lam * sum(M * C^2).

    Args:
        c: k x k functional map
        a: k x d descriptors of the source shape
        b: k x d descriptors of the target shape
        m: k x k non-negative penalty mask
        lam: Non-negative regularization weight

    Returns:
        The energy value
    """
    c_arr, a_arr, b_arr, m_arr = as_array(c), as_array(a), as_array(b), as_array(m)
    _check_energy_shapes(c_arr, a_arr, b_arr, m_arr)
    if lam < 0:
        raise InvalidParameterError(f"lambda must be non-negative, got {lam}")

    data_term = float(np.sum(np.square(c_arr @ a_arr - b_arr)))
    if lam == 0:
        return data_term
    return data_term + lam * float(np.sum(m_arr * np.square(c_arr)))


def energy_gradient(
        c: FunctionalMap | ArrayLike,
        a: SpectralDescriptors | ArrayLike,
        b: SpectralDescriptors | ArrayLike,
        m: ArrayLike,
        lam: float,
) -> Array:
    """Analytic gradient of `energy` with respect to C: 2(CAA^T - BA^T) + 2 lam (M * C)."""
    c_arr, a_arr, b_arr, m_arr = as_array(c), as_array(a), as_array(b), as_array(m)
    _check_energy_shapes(c_arr, a_arr, b_arr, m_arr)
    if lam < 0:
        raise InvalidParameterError(f"lambda must be non-negative, got {lam}")
    return 2.0 * (c_arr @ a_arr @ a_arr.T - b_arr @ a_arr.T) + 2.0 * lam * (m_arr * c_arr)
