"""Dense matrix wrapper with the norm caches used by the samplers and solvers."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "DenseMatrix",
    "as_matrix",
    "as_vector",
    "squared_row_norms",
    "squared_col_norms",
    "frobenius_sq",
    "matvec",
    "transpose_matvec",
]


class DenseMatrix:
    """Immutable row-major float64 matrix.

    Squared row norms, squared column norms and the squared Frobenius norm
    are computed once at construction. The underlying array is marked
    read-only so the same instance can be shared between concurrent runs.

    Parameters
    ----------
    entries : array_like, shape (m, n)
        Matrix entries. Copied into a C-contiguous float64 array.
    """

    __slots__ = ("entries", "row_norms_sq", "col_norms_sq", "frob_sq")

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"matrix must have at least one entry, got shape {arr.shape}")
        sq = arr * arr
        row = sq.sum(axis=1)
        col = sq.sum(axis=0)
        for a in (arr, row, col):
            a.flags.writeable = False
        self.entries = arr
        self.row_norms_sq = row
        self.col_norms_sq = col
        self.frob_sq = float(row.sum())

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def row(self, i: int) -> np.ndarray:
        return self.entries[i]

    def col(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self):
        return f"DenseMatrix(m={self.m}, n={self.n}, frob_sq={self.frob_sq:.6g})"


def as_matrix(A) -> DenseMatrix:
    return A if isinstance(A, DenseMatrix) else DenseMatrix(A)


def as_vector(v, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a 1-d float64 array, checking its length if given."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-d, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DimensionMismatch(f"{name} has length {arr.shape[0]}, expected {length}")
    return arr


def squared_row_norms(A) -> np.ndarray:
    """Return ``||A[i, :]||^2`` for every row."""
    return as_matrix(A).row_norms_sq


def squared_col_norms(A) -> np.ndarray:
    return as_matrix(A).col_norms_sq


def frobenius_sq(A) -> float:
    return as_matrix(A).frob_sq


def matvec(A, v) -> np.ndarray:
    A = as_matrix(A)
    return A.entries @ as_vector(v, A.n, "v")


def transpose_matvec(A, u) -> np.ndarray:
    A = as_matrix(A)
    return A.entries.T @ as_vector(u, A.m, "u")
