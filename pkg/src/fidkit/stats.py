"""Sample statistics and assembly of the Frechet distance between Gaussians.

The squared distance between ``N(mu1, S1)`` and ``N(mu2, S2)`` is::

    |mu1 - mu2|^2 + tr(S1) + tr(S2) - 2 tr(sqrt(S1 S2))

This module owns everything except the trace-of-square-root term, which is
supplied by :mod:`fidkit.fast_trace` or :mod:`fidkit.baseline`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, NumericalError

__all__ = [
    "CenteredFactor",
    "FidBreakdown",
    "GaussianStats",
    "as_features",
    "assemble_fid",
    "center_factor",
    "fid_diag_only",
    "fid_mean_only",
    "sample_mean",
    "trace_cov",
]

SYMMETRY_RTOL = 1e-9


def as_features(x, min_samples: int = 2) -> np.ndarray:
    """Check a ``d x k`` feature matrix (samples as columns)."""
    x = np.asarray(x)
    if x.dtype not in (np.float32, np.float64):
        x = x.astype(np.float64)
    if x.ndim != 2:
        raise DimensionError(f"features must be 2-D (d x k), got shape {x.shape}")
    if x.shape[1] < min_samples:
        raise DimensionError(f"need at least {min_samples} samples (columns), got k={x.shape[1]}")
    if x.shape[0] < 1:
        raise DimensionError("feature dimension d must be >= 1")
    if not np.all(np.isfinite(x)):
        raise NumericalError("features contain NaN or Inf")
    return x


@dataclass(frozen=True, eq=False)
class CenteredFactor:
    """``d x k`` matrix ``C`` with ``C @ C.T`` equal to the sample covariance.

    The ``1/sqrt(k-1)`` normalisation is already folded into ``values``.
    """

    values: np.ndarray

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def covariance(self) -> np.ndarray:
        return self.values @ self.values.T

    def diagonal(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.values, self.values)


@dataclass(frozen=True, eq=False)
class GaussianStats:
    """Mean and covariance of a feature distribution.

    ``sigma`` is either a dense symmetric ``d x d`` array or a
    :class:`CenteredFactor`. ``sample_count`` is 0 when unknown.
    """

    mu: np.ndarray
    sigma: np.ndarray | CenteredFactor
    sample_count: int = 0

    def __post_init__(self):
        mu = np.asarray(self.mu)
        if mu.ndim != 1:
            raise DimensionError(f"mu must be a vector, got shape {mu.shape}")
        if isinstance(self.sigma, CenteredFactor):
            if self.sigma.d != mu.shape[0]:
                raise DimensionError(f"factor has d={self.sigma.d} but mu has d={mu.shape[0]}")
        else:
            s = np.asarray(self.sigma)
            if s.shape != (mu.shape[0], mu.shape[0]):
                raise DimensionError(f"covariance shape {s.shape} does not match d={mu.shape[0]}")
            scale = max(np.max(np.abs(s)), np.finfo(float).tiny) if s.size else 1.0
            if np.max(np.abs(s - s.T), initial=0.0) > SYMMETRY_RTOL * scale:
                raise NumericalError("covariance matrix is not symmetric")
            object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def from_samples(cls, x, factor: bool = True) -> GaussianStats:
        x = as_features(x)
        c = center_factor(x)
        sigma = c if factor else c.covariance()
        return cls(sample_mean(x), sigma, x.shape[1])

    @property
    def d(self) -> int:
        return self.mu.shape[0]

    @property
    def is_factor(self) -> bool:
        return isinstance(self.sigma, CenteredFactor)

    @cached_property
    def dense(self) -> np.ndarray:
        if self.is_factor:
            return self.sigma.covariance()
        return self.sigma

    def trace(self) -> float:
        if self.is_factor:
            return trace_cov(self.sigma)
        return float(np.trace(self.sigma))

    def diagonal(self) -> np.ndarray:
        if self.is_factor:
            return self.sigma.diagonal()
        return np.diag(self.sigma).copy()


@dataclass(frozen=True)
class FidBreakdown:
    """The four terms of the distance and their sum.

    ``raw_total`` is the sum as computed; ``total`` clips rounding-level
    negatives to zero.
    """

    mean_sq_diff: float
    tr_sigma1: float
    tr_sigma2: float
    tr_sqrt: float
    raw_total: float

    @property
    def total(self) -> float:
        return max(self.raw_total, 0.0)

    @property
    def tolerance(self) -> float:
        return 1e-6 * (self.tr_sigma1 + self.tr_sigma2 + 1.0)


def sample_mean(x) -> np.ndarray:
    x = as_features(x, min_samples=1)
    return x.mean(axis=1)


def center_factor(x) -> CenteredFactor:
    x = as_features(x, min_samples=2)
    k = x.shape[1]
    mu = x.mean(axis=1, keepdims=True)
    return CenteredFactor((x - mu) / np.sqrt(x.dtype.type(k - 1)))


def trace_cov(c: CenteredFactor) -> float:
    """``tr(C C^T)`` as the squared Frobenius norm of ``C``."""
    v = c.values
    return float(np.dot(v.ravel(), v.ravel()))


def _check_dims(s1: GaussianStats, s2: GaussianStats) -> None:
    if s1.d != s2.d:
        raise DimensionError(f"feature dimension mismatch: d={s1.d} vs d={s2.d}")


def assemble_fid(mu1, mu2, tr1: float, tr2: float, tr_sqrt: float) -> FidBreakdown:
    mu1 = np.asarray(mu1, dtype=np.float64)
    mu2 = np.asarray(mu2, dtype=np.float64)
    if mu1.shape != mu2.shape:
        raise DimensionError(f"mean vectors differ in shape: {mu1.shape} vs {mu2.shape}")
    for name, val in (("tr1", tr1), ("tr2", tr2), ("tr_sqrt", tr_sqrt)):
        if not np.isfinite(val):
            raise NumericalError(f"{name} is not finite")
        if val < 0:
            raise ValueError(f"{name} must be non-negative, got {val}")
    diff = mu1 - mu2
    msd = float(diff @ diff)
    raw = msd + tr1 + tr2 - 2.0 * tr_sqrt
    return FidBreakdown(msd, float(tr1), float(tr2), float(tr_sqrt), float(raw))


def fid_mean_only(s1: GaussianStats, s2: GaussianStats) -> float:
    """Approximation: squared distance between the means only."""
    _check_dims(s1, s2)
    diff = s1.mu - s2.mu
    return float(diff @ diff)


def fid_diag_only(s1: GaussianStats, s2: GaussianStats) -> float:
    """Approximation: the distance with both covariances replaced by their diagonals."""
    _check_dims(s1, s2)
    v1, v2 = s1.diagonal(), s2.diagonal()
    if np.any(v1 < 0) or np.any(v2 < 0):
        raise NumericalError("negative variance on a covariance diagonal")
    diff = s1.mu - s2.mu
    return float(diff @ diff + np.sum((np.sqrt(v1) - np.sqrt(v2)) ** 2))
