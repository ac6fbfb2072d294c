"""Frechet distance between Gaussians fitted to feature samples.

The trace-of-square-root term is computed from the eigenvalues of a small
``m x m`` matrix, with a cubic-cost reference, analytic gradients with
respect to the fake samples, and a descent harness on top.
"""

from .baseline import numerr_case, sqrt_psd, trace_sqrt_baseline
from .engine import Engine, frechet_distance
from .errors import DimensionError, FidError, FormatError, NumericalError
from .fast_trace import Route, small_gram, trace_sqrt_auto, trace_sqrt_fast
from .gradients import fid_gradient, fid_value, finite_diff_check
from .stats import (
    CenteredFactor,
    FidBreakdown,
    GaussianStats,
    assemble_fid,
    center_factor,
    fid_diag_only,
    fid_mean_only,
    sample_mean,
    trace_cov,
)

__all__ = [
    "CenteredFactor",
    "DimensionError",
    "Engine",
    "FidBreakdown",
    "FidError",
    "FormatError",
    "GaussianStats",
    "NumericalError",
    "Route",
    "assemble_fid",
    "center_factor",
    "fid_diag_only",
    "fid_gradient",
    "fid_mean_only",
    "fid_value",
    "finite_diff_check",
    "frechet_distance",
    "numerr_case",
    "sample_mean",
    "small_gram",
    "sqrt_psd",
    "trace_cov",
    "trace_sqrt_auto",
    "trace_sqrt_baseline",
    "trace_sqrt_fast",
]

__version__ = "0.1.0"
