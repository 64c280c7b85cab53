"""Orthonormal DCT-II in one and two dimensions, zigzag serialization and truncation.

The 2-D transform is computed separably with a cached cosine basis per length:
``F = C_rows @ f @ C_cols.T`` where ``C[u, i] = sqrt(2/N) A(u) cos(u (2i+1) pi / 2N)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CoefficientCountError, EmptyInputError, ShapeMismatchError

# Stamped into saved galleries; bump when the convention changes.
DCT_CONVENTION = "dct2-orthonormal"
ZIGZAG_CONVENTION = "jpeg-right-first"


@lru_cache(maxsize=64)
def dct_basis(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix of size ``n x n`` (rows are frequencies). Read-only."""
    if n < 1:
        raise EmptyInputError("transform length must be at least 1")
    u = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    basis = np.sqrt(2.0 / n) * np.cos(u * (2 * i + 1) * np.pi / (2 * n))
    basis[0, :] *= 1 / np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def _as_vector(signal) -> np.ndarray:
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeMismatchError(f"expected a 1-D sequence, got shape {x.shape}")
    if x.size == 0:
        raise EmptyInputError("cannot transform an empty sequence")
    return x


def _as_grid(grid) -> np.ndarray:
    pixels = getattr(grid, "pixels", grid)
    x = np.asarray(pixels, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D grid, got shape {x.shape}")
    if x.size == 0:
        raise EmptyInputError("cannot transform an empty grid")
    return x


def dct_1d(signal) -> np.ndarray:
    x = _as_vector(signal)
    return dct_basis(x.size) @ x


def idct_1d(coeffs) -> np.ndarray:
    c = _as_vector(coeffs)
    return dct_basis(c.size).T @ c


def dct_2d(grid) -> np.ndarray:
    """Forward 2-D DCT of a grid or ``GrayImage``; returns the coefficient matrix."""
    x = _as_grid(grid)
    rows, cols = x.shape
    return dct_basis(rows) @ x @ dct_basis(cols).T


def idct_2d(coeffs) -> np.ndarray:
    c = _as_grid(coeffs)
    rows, cols = c.shape
    return dct_basis(rows).T @ c @ dct_basis(cols)


@lru_cache(maxsize=64)
def zigzag_indices(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column index arrays visiting a ``rows x cols`` grid in zigzag order.

    Anti-diagonals ``u + v = s`` are visited in increasing ``s``. Odd diagonals run
    top-right to bottom-left, even ones bottom-left to top-right, so the walk leaves
    (0, 0) rightward. Diagonals are clipped to the grid for non-square shapes.
    """
    if rows < 1 or cols < 1:
        raise EmptyInputError("zigzag of an empty matrix")
    r, c = np.indices((rows, cols)).reshape(2, -1)
    s = r + c
    along = np.where(s % 2 == 1, r, -r)
    order = np.lexsort((along, s))
    rr, cc = r[order], c[order]
    rr.setflags(write=False)
    cc.setflags(write=False)
    return rr, cc


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """Leading zigzag coefficients of a ``source_rows x source_cols`` DCT."""

    values: np.ndarray
    source_rows: int
    source_cols: int

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if v.size > self.source_rows * self.source_cols:
            raise CoefficientCountError(
                f"{v.size} coefficients exceed source size {self.source_rows}x{self.source_cols}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def kept(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, CoeffVector):
            return NotImplemented
        return (
            self.source_rows == other.source_rows
            and self.source_cols == other.source_cols
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None

    def scaled(self, factor: float) -> "CoeffVector":
        return CoeffVector(self.values * factor, self.source_rows, self.source_cols)


def zigzag_scan(matrix) -> CoeffVector:
    m = _as_grid(matrix)
    rr, cc = zigzag_indices(*m.shape)
    return CoeffVector(m[rr, cc], m.shape[0], m.shape[1])


def inverse_zigzag(vector, rows: int, cols: int) -> np.ndarray:
    values = vector.values if isinstance(vector, CoeffVector) else np.asarray(vector, dtype=np.float64)
    if values.size != rows * cols:
        raise ShapeMismatchError(f"{values.size} values cannot fill a {rows}x{cols} matrix")
    rr, cc = zigzag_indices(rows, cols)
    out = np.empty((rows, cols), dtype=np.float64)
    out[rr, cc] = values
    return out


def truncate(vector: CoeffVector, k: int) -> CoeffVector:
    if not 1 <= k <= vector.kept:
        raise CoefficientCountError(f"k={k} outside 1..{vector.kept}")
    return CoeffVector(vector.values[:k], vector.source_rows, vector.source_cols)


def energy_fraction(vector: CoeffVector, k: int) -> float:
    """Share of the total squared-coefficient energy held by the first ``k`` entries."""
    if not 1 <= k <= vector.kept:
        raise CoefficientCountError(f"k={k} outside 1..{vector.kept}")
    sq = vector.values**2
    total = sq.sum()
    if total == 0:
        return 1.0
    return float(sq[:k].sum() / total)
