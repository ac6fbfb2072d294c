"""Cubic-cost reference for ``tr(sqrt(S1 S2))`` and PSD square roots.

The reference forms the symmetric ``d x d`` sandwich
``sqrt(S1) S2 sqrt(S1)``, which is similar to ``S1 S2`` and therefore has the
same eigenvalues. Summing their nonnegative square roots gives the same trace
as a Schur-based ``sqrtm`` that picks the positive root on the diagonal of
its triangular factor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError
from .fast_trace import (
    NegativeEigenvalueWarning,
    Route,
    SpectrumResult,
    clamp_spectrum,
    negative_warn_level,
    small_gram,
    trace_sqrt_fast,
)
from .linalg import gaussian_matrix, sym_eig
from .stats import CenteredFactor, GaussianStats, center_factor

__all__ = [
    "NumerrRecord",
    "PsdSquareRoot",
    "baseline_spectrum",
    "numerr_case",
    "sqrt_psd",
    "trace_sqrt_baseline",
]

SYMMETRY_RTOL = 1e-9
PRECISIONS = {"f32": np.float32, "f64": np.float64}


@dataclass(frozen=True, eq=False)
class PsdSquareRoot:
    values: np.ndarray


def sqrt_psd(sigma: np.ndarray, floor_rtol: float | None = 0.0) -> PsdSquareRoot:
    """Principal square root ``V diag(sqrt(max(lam, 0))) V^T`` of a PSD matrix.

    With the default ``floor_rtol=0`` only negative eigenvalues are clamped.
    Passing ``None`` also zeroes eigenvalues under the numerical-rank floor
    (see :func:`fidkit.fast_trace.noise_floor`).
    """
    sigma = np.asarray(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionError(f"sqrt_psd expects a square matrix, got shape {sigma.shape}")
    scale = float(np.max(np.abs(sigma), initial=0.0))
    if np.max(np.abs(sigma - sigma.T), initial=0.0) > SYMMETRY_RTOL * max(scale, 1e-300):
        raise NumericalError("sqrt_psd: input is not symmetric")
    res = sym_eig(sigma, want_vectors=True)
    lam, vec = res.eigenvalues, res.eigenvectors
    if lam.size and lam[0] < negative_warn_level(lam):
        warnings.warn(
            f"sqrt_psd: eigenvalue {float(lam[0]):.3e} is too negative for a PSD matrix",
            NegativeEigenvalueWarning,
            stacklevel=2,
        )
    if floor_rtol == 0.0:
        lam = np.maximum(lam, lam.dtype.type(0))
    else:
        lam, _, _ = clamp_spectrum(lam, floor_rtol)
    root = (vec * np.sqrt(lam)) @ vec.T
    return PsdSquareRoot(root)


def _dense(s) -> np.ndarray:
    if isinstance(s, GaussianStats):
        return s.dense
    if isinstance(s, CenteredFactor):
        return s.covariance()
    return np.asarray(s)


def baseline_spectrum(s1, s2, clamp_rtol: float | None = None) -> SpectrumResult:
    """Spectrum of ``sqrt(S1) S2 sqrt(S1)``; accepts stats, factors or dense matrices."""
    a, b = _dense(s1), _dense(s2)
    if a.shape != b.shape:
        raise DimensionError(f"covariance shapes differ: {a.shape} vs {b.shape}")
    root = sqrt_psd(a, floor_rtol=None).values
    sandwich = root @ b @ root
    eig = sym_eig(sandwich).eigenvalues
    clamped, count, threshold = clamp_spectrum(eig, clamp_rtol)
    return SpectrumResult(eig, count, float(np.sum(np.sqrt(clamped))), threshold)


def trace_sqrt_baseline(s1, s2, clamp_rtol: float | None = None) -> float:
    return baseline_spectrum(s1, s2, clamp_rtol).trace_sqrt


@dataclass(frozen=True)
class NumerrRecord:
    d: int
    m: int
    precision: str
    ground_truth: float
    err_fullsqrt: float
    err_fast: float


def numerr_case(rng: np.random.Generator, d: int, m: int, precision: str = "f32") -> NumerrRecord:
    """One trial of the ``C1 = C2`` error study.

    With ``C1 = C2 = C`` the product ``S1 S2 = (C C^T)^2`` has the known root
    ``C C^T``, so ``tr(sqrt(S1 S2)) = |C|_F^2``. The factor is drawn in float64,
    rounded to the requested precision, and both routes then run entirely at
    that precision. The ground truth is evaluated in float64 from the rounded
    factor.
    """
    if d < 2 or m < 2:
        raise DimensionError(f"numerr needs d, m >= 2, got d={d}, m={m}")
    dtype = PRECISIONS[precision]
    c = center_factor(gaussian_matrix(rng, d, m)).values.astype(dtype)
    c64 = c.astype(np.float64)
    truth = float(np.dot(c64.ravel(), c64.ravel()))

    cov = c @ c.T
    root = sqrt_psd(cov @ cov).values
    full = float(np.trace(root, dtype=dtype))

    gram = small_gram(c, CenteredFactor(c), Route.PAIRS)
    fast = trace_sqrt_fast(gram).trace_sqrt
    return NumerrRecord(d, m, precision, truth, abs(truth - full), abs(truth - fast))
