"""Seeded problem generators and the timing / error sweeps behind the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .baseline import NumerrRecord, numerr_case, trace_sqrt_baseline
from .fast_trace import trace_sqrt_auto
from .linalg import gaussian_matrix, make_rng, single_threaded
from .stats import GaussianStats, center_factor

__all__ = [
    "BenchRow",
    "bench_target",
    "gradcheck_problem",
    "run_bench",
    "run_numerr",
    "time_call",
]

ENGINES = ("fast", "baseline")


@dataclass(frozen=True)
class BenchRow:
    m: int
    engine: str
    mean_seconds: float
    std_seconds: float


def time_call(fn, trials: int) -> tuple[float, float]:
    """One untimed warmup call, then ``trials`` timed calls: (mean, sample std)."""
    fn()
    times = np.empty(trials)
    for t in range(trials):
        start = time.perf_counter()
        fn()
        times[t] = time.perf_counter() - start
    std = float(times.std(ddof=1)) if trials > 1 else 0.0
    return float(times.mean()), std


def bench_target(d: int, n: int, seed: int) -> GaussianStats:
    """Real-side statistics with a dense, precomputed covariance from ``n`` N(0, 1) samples."""
    x2 = gaussian_matrix(make_rng([seed, 1]), d, n)
    return GaussianStats.from_samples(x2, factor=False)


def _fast_once(x1: np.ndarray, real: GaussianStats) -> float:
    return trace_sqrt_auto(center_factor(x1), real).trace_sqrt


def _baseline_once(x1: np.ndarray, real: GaussianStats) -> float:
    fake = GaussianStats(x1.mean(axis=1), center_factor(x1).covariance(), x1.shape[1])
    return trace_sqrt_baseline(fake, real)


def run_bench(
    d: int,
    ms: list[int],
    n: int,
    trials: int,
    mode: str = "both",
    seed: int = 0,
    real: GaussianStats | None = None,
) -> list[BenchRow]:
    """Time the trace-of-root term for each batch size on synthetic data.

    Each call starts from the raw ``d x m`` fake features, so centering is
    included; the real covariance is precomputed once.
    """
    engines = ENGINES if mode == "both" else (mode,)
    if real is None:
        real = bench_target(d, n, seed)
    funcs = {"fast": _fast_once, "baseline": _baseline_once}
    rows = []
    with single_threaded():
        for m in ms:
            x1 = gaussian_matrix(make_rng([seed, 2, m]), d, m)
            for engine in engines:
                fn = funcs[engine]
                mean, std = time_call(lambda: fn(x1, real), trials)
                rows.append(BenchRow(m, engine, mean, std))
    return rows


def run_numerr(d: int, ms: list[int], precisions: list[str], trials: int, seed: int = 0) -> list[NumerrRecord]:
    """Trial ``t`` at batch size ``m`` uses the same factor for every precision."""
    out = []
    for m in ms:
        for t in range(trials):
            for p in precisions:
                out.append(numerr_case(make_rng([seed, m, t]), d, m, p))
    return out


def gradcheck_problem(d: int = 16, m: int = 6, seed: int = 0, duplicate: bool = False):
    """Fake features ``x1`` and target statistics for a gradient check.

    The target is built from ``4 d`` shifted and rescaled Gaussian samples and
    kept as a centered factor. With ``duplicate`` the last column of ``x1``
    repeats the first, putting the distance on a nonsmooth point.
    """
    rng = make_rng([seed, 3])
    x1 = gaussian_matrix(rng, d, m)
    if duplicate:
        x1[:, -1] = x1[:, 0]
    x2 = 0.8 * gaussian_matrix(rng, d, 4 * d) + 0.5
    return x1, GaussianStats.from_samples(x2, factor=True)
