"""End-to-end distance between fake samples and precomputed real statistics."""

from __future__ import annotations

import enum

import numpy as np

from .baseline import trace_sqrt_baseline
from .errors import DimensionError
from .fast_trace import trace_sqrt_auto
from .stats import FidBreakdown, GaussianStats, assemble_fid, fid_diag_only, fid_mean_only

__all__ = ["Engine", "frechet_distance", "is_approximation"]


class Engine(str, enum.Enum):
    FAST = "fast"
    BASELINE = "baseline"
    MEAN_ONLY = "mean-only"
    DIAG_ONLY = "diag-only"


def is_approximation(engine: Engine | str) -> bool:
    return Engine(engine) in (Engine.MEAN_ONLY, Engine.DIAG_ONLY)


def frechet_distance(fake, real: GaussianStats, engine: Engine | str = Engine.FAST) -> FidBreakdown:
    """Distance between ``fake`` (``d x m`` features or stats) and ``real``.

    The approximate engines fill the breakdown as far as they go: ``mean-only``
    leaves all covariance terms at zero, ``diag-only`` uses per-coordinate
    square roots for the cross term.
    """
    engine = Engine(engine)
    if not isinstance(fake, GaussianStats):
        fake = GaussianStats.from_samples(fake, factor=True)
    if fake.d != real.d:
        raise DimensionError(f"feature dimension mismatch: fake d={fake.d}, real d={real.d}")

    if engine is Engine.MEAN_ONLY:
        msd = fid_mean_only(fake, real)
        return FidBreakdown(msd, 0.0, 0.0, 0.0, msd)
    tr1, tr2 = fake.trace(), real.trace()
    if engine is Engine.DIAG_ONLY:
        cross = float(np.sum(np.sqrt(fake.diagonal() * real.diagonal())))
        out = assemble_fid(fake.mu, real.mu, tr1, tr2, cross)
        # (sqrt(a) - sqrt(b))^2 form is exactly nonnegative; keep it as the total.
        return FidBreakdown(out.mean_sq_diff, tr1, tr2, cross, fid_diag_only(fake, real))
    if engine is Engine.BASELINE:
        tr_sqrt = trace_sqrt_baseline(fake, real)
    else:
        if not fake.is_factor:
            raise ValueError("the fast engine needs the fake side as samples or a centered factor")
        tr_sqrt = trace_sqrt_auto(fake.sigma, real).trace_sqrt
    return assemble_fid(fake.mu, real.mu, tr1, tr2, tr_sqrt)
