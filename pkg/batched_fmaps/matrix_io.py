"""Plain-text CSV matrix format shared by every command.

One row per line, comma-separated decimal floats, no header. Ragged rows are
rejected.
"""
import logging
import warnings
from pathlib import Path
from typing import TextIO

import numpy as np
from numpy.typing import NDArray

from batched_fmaps.exceptions import MatrixFormatError


def read_matrix_csv(path: str | Path, dtype: type = np.float64) -> NDArray[np.floating]:
    """Read a dense matrix from a CSV file.

    Args:
        path: File to read
        dtype: Element type of the returned array

    Returns:
        2-D array with one row per non-blank line

    Raises:
        MatrixFormatError: On ragged rows, non-numeric fields or an empty file
        OSError: If the file cannot be opened
    """
    try:
        with warnings.catch_warnings():
            # an empty file is reported below as a format error
            warnings.simplefilter("ignore", UserWarning)
            matrix = np.loadtxt(path, delimiter=",", dtype=dtype, ndmin=2)
    except ValueError as e:
        raise MatrixFormatError(f"{path}: malformed CSV matrix ({e})") from e

    if matrix.size == 0:
        raise MatrixFormatError(f"{path}: no data rows")

    logging.debug(f"read_matrix_csv: {path} -> {matrix.shape[0]}x{matrix.shape[1]}")
    return matrix


def read_vector_csv(path: str | Path, dtype: type = np.float64) -> NDArray[np.floating]:
    """Read a vector stored either as one column or as one row."""
    matrix = read_matrix_csv(path, dtype=dtype)
    if matrix.shape[0] != 1 and matrix.shape[1] != 1:
        raise MatrixFormatError(f"{path}: expected a single row or column, got {matrix.shape}")
    return matrix.ravel()


def write_matrix_csv(target: str | Path | TextIO, matrix: NDArray[np.floating], digits: int = 17) -> None:
    """Write a 1-D or 2-D array as a CSV matrix to a path or an open text stream.

    17 significant digits round-trip float64 exactly; a 1-D array becomes one row.
    """
    array = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if array.ndim != 2:
        raise MatrixFormatError(f"Only 1-D or 2-D arrays can be written, got {array.ndim}-D")
    np.savetxt(target, array, delimiter=",", fmt=f"%.{digits}g")
