"""``tr(sqrt(S1 S2))`` from the spectrum of a small ``m x m`` matrix.

With ``S1 = C1 C1^T`` (``C1`` is ``d x m``), the nonzero eigenvalues of the
``d x d`` product ``S1 S2`` coincide with those of ``M = C1^T S2 C1``, because
``AB`` and ``BA`` share their nonzero spectrum. ``M`` is symmetric PSD, so the
trace of the principal square root is the sum of the square roots of its
eigenvalues. Two ways of forming ``M`` are offered:

* ``PAIRS``: ``(C1^T C2)(C2^T C1)``, cost ``m d n + m^2 n``, needs the factor ``C2``.
* ``PRECOMPUTED``: ``C1^T (S2 C1)``, cost ``d^2 m``, needs a dense ``S2``.

Both are followed by an ``O(m^3)`` eigenvalue solve.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .linalg import sym_eig
from .stats import CenteredFactor, GaussianStats

__all__ = [
    "NegativeEigenvalueWarning",
    "Route",
    "SmallGram",
    "SpectrumResult",
    "choose_route",
    "clamp_spectrum",
    "negative_warn_level",
    "route_costs",
    "small_gram",
    "trace_sqrt_auto",
    "trace_sqrt_fast",
]

# Eigenvalues below -NEGATIVE_WARN_RTOL * lambda_max are too negative to be
# rounding noise of a PSD matrix and trigger a warning. In single precision
# the level is raised to n * eps, the size of ordinary rounding there.
NEGATIVE_WARN_RTOL = 1e-8


class NegativeEigenvalueWarning(RuntimeWarning):
    pass


class Route(str, enum.Enum):
    PAIRS = "pairs"
    PRECOMPUTED = "precomputed"


@dataclass(frozen=True, eq=False)
class SmallGram:
    values: np.ndarray
    route: Route

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    clamped_count: int
    trace_sqrt: float
    clamp_threshold: float
    route: Route | None = None


def noise_floor(eigenvalues: np.ndarray, rtol: float | None = None) -> float:
    """Level below which an eigenvalue of a PSD matrix is treated as zero.

    Defaults to ``n * eps * lambda_max``, the usual numerical-rank cutoff: a
    structurally zero eigenvalue comes out of the solver at about that size
    and its square root would otherwise leak ``sqrt(eps)``-sized error.
    """
    n = eigenvalues.shape[0]
    if rtol is None:
        rtol = n * float(np.finfo(eigenvalues.dtype).eps)
    top = float(eigenvalues[-1]) if n else 0.0
    return rtol * max(top, 0.0)


def negative_warn_level(eigenvalues: np.ndarray) -> float:
    n = eigenvalues.shape[0]
    rtol = max(NEGATIVE_WARN_RTOL, n * float(np.finfo(eigenvalues.dtype).eps))
    top = float(eigenvalues[-1]) if n else 0.0
    return -rtol * max(top, 0.0)


def clamp_spectrum(eigenvalues: np.ndarray, rtol: float | None = None):
    """Zero out eigenvalues at or below the noise floor.

    Returns ``(clamped, count, threshold)``. Warns when an eigenvalue is
    negative beyond what rounding can explain.
    """
    threshold = noise_floor(eigenvalues, rtol)
    top = float(eigenvalues[-1]) if eigenvalues.size else 0.0
    if eigenvalues.size and eigenvalues[0] < negative_warn_level(eigenvalues):
        warnings.warn(
            f"matrix expected to be PSD has eigenvalue {float(eigenvalues[0]):.3e} "
            f"(largest {top:.3e})",
            NegativeEigenvalueWarning,
            stacklevel=3,
        )
    mask = eigenvalues <= threshold
    clamped = np.where(mask, eigenvalues.dtype.type(0), eigenvalues)
    return clamped, int(mask.sum()), threshold


def _factor_values(c) -> np.ndarray:
    return c.values if isinstance(c, CenteredFactor) else np.asarray(c)


def route_costs(m: int, d: int, n: int | None) -> dict[Route, float]:
    """Multiply-add counts of the two ways of building and solving ``M``."""
    costs = {Route.PRECOMPUTED: float(d) * d * m + float(m) ** 3}
    if n is not None:
        costs[Route.PAIRS] = float(m) * d * n + float(m) * m * n + float(m) ** 3
    return costs


def choose_route(m: int, d: int, n: int | None) -> Route:
    """Cheaper route by operation count; ties go to ``PRECOMPUTED``."""
    costs = route_costs(m, d, n)
    if Route.PAIRS in costs and costs[Route.PAIRS] < costs[Route.PRECOMPUTED]:
        return Route.PAIRS
    return Route.PRECOMPUTED


def small_gram(c1, other, route: Route | str | None = None) -> SmallGram:
    """Form ``M = C1^T S2 C1``.

    ``other`` is a :class:`CenteredFactor` ``C2``, a dense covariance, or a
    :class:`GaussianStats`. Without an explicit ``route`` a factor uses
    ``PAIRS`` when ``n < d`` and is densified otherwise; a dense covariance
    always uses ``PRECOMPUTED``.
    """
    a = _factor_values(c1)
    if isinstance(other, GaussianStats):
        other = other.sigma
    d = a.shape[0]
    if isinstance(other, CenteredFactor):
        b = other.values
        if b.shape[0] != d:
            raise DimensionError(f"factor dimensions differ: d={d} vs d={b.shape[0]}")
        if route is None:
            route = Route.PAIRS if b.shape[1] < d else Route.PRECOMPUTED
        route = Route(route)
        if route is Route.PAIRS:
            cross = a.T @ b
            m_val = cross @ cross.T
        else:
            m_val = a.T @ ((b @ b.T) @ a)
    else:
        sigma = np.asarray(other)
        if sigma.shape != (d, d):
            raise DimensionError(f"covariance shape {sigma.shape} does not match d={d}")
        if route is not None and Route(route) is Route.PAIRS:
            raise ValueError("the pairs route needs a centered factor, not a dense covariance")
        route = Route.PRECOMPUTED
        m_val = a.T @ (sigma @ a)
    return SmallGram(m_val, route)


def trace_sqrt_fast(g: SmallGram, clamp_rtol: float | None = None) -> SpectrumResult:
    eig = sym_eig(g.values).eigenvalues
    clamped, count, threshold = clamp_spectrum(eig, clamp_rtol)
    total = float(np.sum(np.sqrt(clamped)))
    return SpectrumResult(eig, count, total, threshold, g.route)


def trace_sqrt_auto(c1, s2: GaussianStats, clamp_rtol: float | None = None) -> SpectrumResult:
    a = _factor_values(c1)
    if a.shape[0] != s2.d:
        raise DimensionError(f"feature dimension mismatch: d={a.shape[0]} vs d={s2.d}")
    n = s2.sigma.k if s2.is_factor else None
    route = choose_route(a.shape[1], s2.d, n)
    if route is Route.PRECOMPUTED:
        g = small_gram(a, s2.dense, Route.PRECOMPUTED)
    else:
        g = small_gram(a, s2.sigma, Route.PAIRS)
    return trace_sqrt_fast(g, clamp_rtol)
