"""Analytic gradient of the Frechet distance with respect to the fake features.

For ``X1`` (``d x m``) with mean ``mu1`` and factor ``C1 = X1 P / sqrt(m-1)``
(``P`` the centering projector), the distance to fixed target statistics is::

    F = |mu1 - mu2|^2 + |C1|_F^2 + tr(S2) - 2 sum_i sqrt(lam_i(M)),  M = C1^T S2 C1

Differentiating the eigenvalue sum gives ``d sum sqrt(lam) = tr(G dM)`` with
``G = V diag(1 / (2 sqrt(lam))) V^T``, so the three pieces are::

    mean term:  (2/m) (mu1 - mu2) 1^T
    trace term: 2 C1 / sqrt(m-1)
    sqrt term:  2 (S2 C1 G) P / sqrt(m-1)

and ``grad F = mean + trace - 2 * sqrt``. Eigenvalues at or below
``grad_rtol * max(lam_max, 1)`` sit on the kink of the square root; they
contribute nothing to ``G`` and are reported as nonsmooth directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError, NumericalError
from .fast_trace import Route, SpectrumResult, choose_route, clamp_spectrum
from .linalg import make_rng, sym_eig
from .stats import CenteredFactor, FidBreakdown, GaussianStats, as_features, assemble_fid, trace_cov

__all__ = [
    "FdCheckResult",
    "FidGradient",
    "fid_gradient",
    "fid_value",
    "finite_diff_check",
    "grad_mean_term",
    "grad_sqrt_term",
    "grad_trace_term",
]

GRAD_CLAMP_RTOL = 1e-10
# A column is tied to a nonsmooth direction when the projected null vector
# has a component above this size in that column.
NONSMOOTH_COMPONENT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class FidGradient:
    wrt_features: np.ndarray
    value: FidBreakdown
    spectrum: SpectrumResult
    half_inv_sqrt: np.ndarray
    nonsmooth_count: int = 0
    nonsmooth_columns: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))


def _sigma_times(target: GaussianStats, c1: np.ndarray) -> np.ndarray:
    """``S2 @ C1`` using whichever form of ``S2`` is cheaper."""
    if target.is_factor:
        c2 = target.sigma.values
        if choose_route(c1.shape[1], target.d, c2.shape[1]) is Route.PAIRS:
            return c2 @ (c2.T @ c1)
    return target.dense @ c1


def _prepare(x1, target: GaussianStats):
    x1 = as_features(x1, min_samples=2).astype(np.float64, copy=False)
    if x1.shape[0] != target.d:
        raise DimensionError(f"feature dimension mismatch: X1 has d={x1.shape[0]}, target d={target.d}")
    m = x1.shape[1]
    mu1 = x1.mean(axis=1)
    c1 = (x1 - mu1[:, None]) / np.sqrt(m - 1)
    return x1, mu1, c1


def _spectrum_and_value(mu1, c1, s2c1, target, clamp_rtol):
    res = sym_eig(c1.T @ s2c1, want_vectors=True)
    clamped, count, threshold = clamp_spectrum(res.eigenvalues, clamp_rtol)
    tr_sqrt = float(np.sum(np.sqrt(clamped)))
    spectrum = SpectrumResult(res.eigenvalues, count, tr_sqrt, threshold)
    value = assemble_fid(mu1, target.mu, trace_cov(CenteredFactor(c1)), target.trace(), tr_sqrt)
    return res, spectrum, value


def fid_value(x1, target: GaussianStats, clamp_rtol: float | None = None) -> FidBreakdown:
    """Distance from the columns of ``x1`` to ``target``, same numerics as the gradient."""
    _, mu1, c1 = _prepare(x1, target)
    _, _, value = _spectrum_and_value(mu1, c1, _sigma_times(target, c1), target, clamp_rtol)
    return value


def grad_mean_term(x1, target: GaussianStats) -> np.ndarray:
    x1, mu1, _ = _prepare(x1, target)
    m = x1.shape[1]
    return np.repeat(((2.0 / m) * (mu1 - target.mu))[:, None], m, axis=1)


def grad_trace_term(x1, target: GaussianStats) -> np.ndarray:
    x1, _, c1 = _prepare(x1, target)
    return 2.0 * c1 / np.sqrt(x1.shape[1] - 1)


def _half_inv_sqrt(eigenvalues, eigenvectors, grad_rtol):
    cutoff = grad_rtol * max(float(eigenvalues[-1]), 1.0)
    smooth = eigenvalues > cutoff
    scale = np.zeros_like(eigenvalues)
    scale[smooth] = 0.5 / np.sqrt(eigenvalues[smooth])
    g = (eigenvectors * scale) @ eigenvectors.T
    return g, eigenvectors[:, ~smooth]


def grad_sqrt_term(x1, target: GaussianStats, grad_rtol: float = GRAD_CLAMP_RTOL) -> np.ndarray:
    """Gradient of ``tr(sqrt(S1 S2))`` alone."""
    x1, _, c1 = _prepare(x1, target)
    s2c1 = _sigma_times(target, c1)
    res = sym_eig(c1.T @ s2c1, want_vectors=True)
    g, _ = _half_inv_sqrt(res.eigenvalues, res.eigenvectors, grad_rtol)
    y = s2c1 @ g
    return 2.0 * (y - y.mean(axis=1, keepdims=True)) / np.sqrt(x1.shape[1] - 1)


def _nonsmooth_columns(null_vectors: np.ndarray):
    """Directions of the kink that are not just the centering direction."""
    if null_vectors.shape[1] == 0:
        return 0, np.zeros(0, dtype=int)
    projected = null_vectors - null_vectors.mean(axis=0, keepdims=True)
    u, s, _ = np.linalg.svd(projected, full_matrices=False)
    basis = u[:, s > NONSMOOTH_COMPONENT_TOL]
    if basis.shape[1] == 0:
        return 0, np.zeros(0, dtype=int)
    weight = np.linalg.norm(basis, axis=1)
    return basis.shape[1], np.flatnonzero(weight > NONSMOOTH_COMPONENT_TOL)


def fid_gradient(
    x1,
    target: GaussianStats,
    grad_rtol: float = GRAD_CLAMP_RTOL,
    clamp_rtol: float | None = None,
) -> FidGradient:
    x1, mu1, c1 = _prepare(x1, target)
    m = x1.shape[1]
    s2c1 = _sigma_times(target, c1)
    res, spectrum, value = _spectrum_and_value(mu1, c1, s2c1, target, clamp_rtol)
    g, null_vectors = _half_inv_sqrt(res.eigenvalues, res.eigenvectors, grad_rtol)

    norm = np.sqrt(m - 1)
    mean_term = (2.0 / m) * (mu1 - target.mu)[:, None]
    trace_term = 2.0 * c1 / norm
    y = s2c1 @ g
    sqrt_term = 2.0 * (y - y.mean(axis=1, keepdims=True)) / norm
    grad = mean_term + trace_term - 2.0 * sqrt_term
    if not np.all(np.isfinite(grad)):
        raise NumericalError("gradient contains non-finite entries")
    count, cols = _nonsmooth_columns(null_vectors)
    return FidGradient(grad, value, spectrum, g, count, cols)


@dataclass(frozen=True)
class FdCheckResult:
    max_rel_err: float
    mean_rel_err: float
    checked: int
    skipped: int
    nonsmooth_columns: tuple[int, ...]


def finite_diff_check(
    x1,
    target: GaussianStats,
    step: float = 1e-4,
    max_full: int = 2000,
    sample_size: int = 200,
    seed: int = 0,
    gradient_fn: Callable[[np.ndarray, GaussianStats], FidGradient] = fid_gradient,
) -> FdCheckResult:
    """Compare the analytic gradient with central differences of the distance.

    Entry ``(i, j)`` is perturbed by ``h = step * (1 + |x_ij|)``. All entries
    are checked when ``d * m <= max_full``, otherwise a seeded random subset of
    ``sample_size``. Columns involved in a nonsmooth direction are skipped.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x1 = as_features(x1).astype(np.float64)
    grad = gradient_fn(x1, target)
    d, m = x1.shape
    entries = [(i, j) for j in range(m) for i in range(d)]
    if d * m > max_full:
        pick = make_rng(seed).choice(len(entries), size=sample_size, replace=False)
        entries = [entries[k] for k in sorted(pick)]
    skip_cols = set(int(c) for c in grad.nonsmooth_columns)
    errs = []
    skipped = 0
    for i, j in entries:
        if j in skip_cols:
            skipped += 1
            continue
        h = step * (1.0 + abs(x1[i, j]))
        xp = x1.copy()
        xp[i, j] += h
        xm = x1.copy()
        xm[i, j] -= h
        fd = (fid_value(xp, target).raw_total - fid_value(xm, target).raw_total) / (2.0 * h)
        a = grad.wrt_features[i, j]
        errs.append(abs(a - fd) / (abs(a) + abs(fd) + 1e-8))
    errs = np.asarray(errs) if errs else np.zeros(1)
    return FdCheckResult(
        float(errs.max()), float(errs.mean()), len(entries) - skipped, skipped, tuple(sorted(skip_cols))
    )
