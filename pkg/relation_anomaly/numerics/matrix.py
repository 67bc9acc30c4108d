"""Dense 64-bit matrices.

A ``Matrix`` is a two-dimensional, row-major ``float64`` numpy array. Batches
of vectors are matrices with one sample per row.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError, NonFiniteError, ValidationError

Matrix = np.ndarray

DTYPE = np.float64


def as_matrix(values: Sequence[float] | np.ndarray, rows: int | None = None, cols: int | None = None) -> Matrix:
    """Build a finite float64 matrix.

    With ``rows``/``cols`` given, ``values`` is read as a flat row-major list.
    A 1-D array without shape hints becomes a single-row matrix.
    """
    arr = np.asarray(values, dtype=DTYPE)
    if rows is not None and cols is not None:
        if arr.size != rows * cols:
            raise ValidationError(f"expected {rows}x{cols}={rows * cols} values, got {arr.size}")
        arr = arr.reshape(rows, cols)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValidationError(f"matrix must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix contains non-finite values")
    return arr


def as_batch(x: np.ndarray) -> tuple[Matrix, bool]:
    """Return ``x`` as a batch matrix and whether it was a single vector."""
    arr = np.asarray(x, dtype=DTYPE)
    if arr.ndim == 1:
        return arr.reshape(1, -1), True
    if arr.ndim != 2:
        raise ValidationError(f"expected a vector or a batch matrix, got shape {arr.shape}")
    return arr, False


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Standard matrix product with an explicit shape check."""
    a = np.asarray(a, dtype=DTYPE)
    b = np.asarray(b, dtype=DTYPE)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatchError("matmul dimension mismatch", a.shape, b.shape)
    return a @ b
