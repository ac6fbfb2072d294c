"""Dense matrix kernels and the symmetric eigensolver.

Matrices are plain numpy arrays. Feature matrices hold one sample per column
(``d x k``). Everything runs in float64 unless a float32 array is passed in
explicitly, which is how the reduced-precision error study is carried out.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DimensionError, NumericalError

__all__ = [
    "SymEigResult",
    "as_matrix",
    "gaussian_matrix",
    "make_rng",
    "matmul",
    "single_threaded",
    "sym_eig",
]


@dataclass(frozen=True)
class SymEigResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def as_matrix(a, name: str = "matrix", dtype=np.float64) -> np.ndarray:
    """Validate a 2-D finite array and return it with the requested dtype."""
    a = np.asarray(a, dtype=dtype)
    if a.ndim != 2:
        raise DimensionError(f"{name}: expected a 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"{name}: contains NaN or Inf")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: inner dimensions differ ({a.shape[1]} vs {b.shape[0]})")
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    if not np.all(np.isfinite(out)):
        raise NumericalError("matmul produced non-finite entries")
    return out


def sym_eig(a: np.ndarray, want_vectors: bool = False) -> SymEigResult:
    """Eigen-decomposition of the symmetric part ``(A + A^T) / 2``.

    Eigenvalues come back in ascending order. The dtype of ``a`` is kept, so a
    float32 input is decomposed with single-precision LAPACK routines.
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"sym_eig expects a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericalError("sym_eig: input contains NaN or Inf")
    sym = (a + a.T) / a.dtype.type(2)
    try:
        if want_vectors:
            w, v = np.linalg.eigh(sym)
        else:
            w, v = np.linalg.eigvalsh(sym), None
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver did not converge: {exc}") from exc
    return SymEigResult(w, v)


def make_rng(seed: int | Sequence[int]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gaussian_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """``rows x cols`` matrix of i.i.d. N(0, 1) draws from ``rng``."""
    if rows < 1 or cols < 1:
        raise DimensionError(f"gaussian_matrix needs positive dimensions, got {rows}x{cols}")
    return rng.standard_normal((rows, cols))


@contextlib.contextmanager
def single_threaded() -> Iterator[None]:
    """Pin BLAS/LAPACK to one thread for the duration of the block."""
    with threadpool_limits(limits=1):
        yield
