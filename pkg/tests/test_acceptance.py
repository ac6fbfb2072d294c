"""Exit criteria. Each test prints one PASS/FAIL line (collected in the summary).

Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import itertools
import time

import numpy as np
import pytest

from fidkit import io
from fidkit.baseline import baseline_spectrum
from fidkit.cli import main
from fidkit.descent import AttackConfig, Encoder, default_init, default_problem, run_attack
from fidkit.engine import frechet_distance
from fidkit.experiments import bench_target, run_bench, run_numerr
from fidkit.fast_trace import Route, small_gram
from fidkit.gradients import fid_gradient
from fidkit.linalg import gaussian_matrix, make_rng
from fidkit.stats import CenteredFactor, GaussianStats, center_factor


def test_1_cross_engine_exactness(acceptance):
    start = time.perf_counter()
    combos = list(itertools.product((32, 64, 256, 512), (4, 8, 32, 128), ("2m", "d", "4d")))
    worst, where = 0.0, None
    for i in range(200):
        d, m, nk = combos[i % len(combos)]
        n = {"2m": 2 * m, "d": d, "4d": 4 * d}[nk]
        rng = make_rng([1, i])
        fake = gaussian_matrix(rng, d, m) * rng.uniform(0.5, 2.0)
        real = GaussianStats.from_samples(gaussian_matrix(rng, d, n) + rng.uniform(-1, 1))
        fast = frechet_distance(fake, real, "fast").total
        base = frechet_distance(fake, real, "baseline").total
        err = abs(fast - base) / (1 + base)
        if err > worst:
            worst, where = err, (d, m, n)
    elapsed = time.perf_counter() - start
    acceptance("1 cross-engine exactness", worst <= 1e-8 and elapsed < 120,
               f"worst rel diff {worst:.2e} at (d,m,n)={where}, {elapsed:.1f}s")


def test_2_eigenvalue_identity(acceptance):
    worst = 0.0
    rng = make_rng(2)
    for _ in range(50):
        d, m, n = int(rng.integers(1, 9)), int(rng.integers(2, 5)), int(rng.integers(2, 11))
        c1 = center_factor(gaussian_matrix(rng, d, m))
        c2 = center_factor(gaussian_matrix(rng, d, n))
        small = np.sort(np.linalg.eigvalsh(small_gram(c1, c2, Route.PAIRS).values))[::-1]
        big = np.sort(baseline_spectrum(c1, c2).eigenvalues)[::-1]
        size = max(small.size, big.size)
        diff = np.abs(np.pad(small, (0, size - small.size)) - np.pad(big, (0, size - big.size)))
        worst = max(worst, float(diff.max()))
    acceptance("2 eigenvalue identity", worst <= 1e-9, f"max |lambda(M) - lambda(sandwich)| = {worst:.2e}")


def test_3_closed_form_diagonal(acceptance):
    hand_fake = GaussianStats(np.zeros(2), CenteredFactor(np.diag([1.0, 2.0])))
    hand_real = GaussianStats(np.zeros(2), np.diag([9.0, 16.0]))
    errs = [abs(frechet_distance(hand_fake, hand_real, e).total - 8.0) for e in ("fast", "baseline")]
    rng = make_rng(3)
    for _ in range(20):
        d = int(rng.integers(1, 40))
        v1, v2 = rng.uniform(0, 5, d), rng.uniform(0, 5, d)
        mu1, mu2 = rng.standard_normal(d), rng.standard_normal(d)
        closed = float(np.sum((mu1 - mu2) ** 2) + np.sum((np.sqrt(v1) - np.sqrt(v2)) ** 2))
        fake = GaussianStats(mu1, CenteredFactor(np.diag(np.sqrt(v1))))
        real = GaussianStats(mu2, np.diag(v2))
        for e in ("fast", "baseline", "diag-only"):
            errs.append(abs(frechet_distance(fake, real, e).total - closed) / max(1.0, closed))
    worst = max(errs)
    acceptance("3 closed-form diagonal cases", worst <= 1e-10, f"worst error {worst:.2e} (hand case -> 8)")


def test_4_gradient_correctness(acceptance, capsys):
    start = time.perf_counter()
    code = main(["gradcheck"])
    out = capsys.readouterr().out
    max_rel = float(out.split("max_rel_err=")[1].split()[0])
    ratios = []
    for seed, (d, m) in enumerate([(16, 6), (8, 5), (32, 20), (64, 64), (5, 30)]):
        x1 = gaussian_matrix(make_rng([4, seed]), d, m) * 2 - 1
        g = fid_gradient(x1, GaussianStats.from_samples(x1)).wrt_features
        ratios.append(np.linalg.norm(g) / np.linalg.norm(x1))
    elapsed = time.perf_counter() - start
    ok = code == 0 and max_rel <= 1e-5 and max(ratios) <= 1e-6 and elapsed < 30
    acceptance("4 gradient correctness", ok,
               f"gradcheck max rel {max_rel:.2e} (exit {code}); stationarity |g|/|X| <= {max(ratios):.1e}; {elapsed:.1f}s")


@pytest.mark.slow
def test_5_speed_trend(acceptance):
    start = time.perf_counter()
    d = 2048
    real = bench_target(d, d, 0)
    ms = [8, 16, 32, 64, 128, 256]
    fast = {r.m: r.mean_seconds for r in run_bench(d, ms, d, 30, "fast", real=real)}
    base = run_bench(d, [128], d, 3, "baseline", real=real)[0].mean_seconds
    speedup = base / fast[128]
    monotone = all(fast[b] >= 0.8 * fast[a] for a, b in zip(ms, ms[1:]))
    elapsed = time.perf_counter() - start
    times = ", ".join(f"{m}:{fast[m] * 1e3:.1f}ms" for m in ms)
    acceptance("5 speed trend", speedup >= 5 and monotone and elapsed < 300,
               f"speedup at m=128 {speedup:.0f}x (baseline {base:.2f}s); fast {times}; {elapsed:.0f}s")


@pytest.mark.slow
def test_6_numerical_error_ordering(acceptance):
    start = time.perf_counter()
    ms = [8, 16, 32, 64, 128, 256]
    recs = run_numerr(512, ms, ["f32", "f64"], 20, seed=6)
    f32 = [r for r in recs if r.precision == "f32"]
    f64 = [r for r in recs if r.precision == "f64"]
    win_rate = min(np.mean([r.err_fast < r.err_fullsqrt for r in f32 if r.m == m]) for m in ms)
    rel32 = max(r.err_fast / r.ground_truth for r in f32)
    rel64 = max(r.err_fast / r.ground_truth for r in f64)
    elapsed = time.perf_counter() - start
    ok = win_rate >= 0.95 and rel32 <= 1e-4 and rel64 <= 1e-9 and elapsed < 300
    acceptance("6 numerical-error ordering", ok,
               f"min win rate {win_rate:.2f}; f32 fast rel err {rel32:.1e}; f64 fast rel err {rel64:.1e}; {elapsed:.0f}s")


def test_7_adversarial_descent(acceptance):
    start = time.perf_counter()
    target, train, val = default_problem(64)
    enc = Encoder.identity(64)
    cfg = AttackConfig(mode="minimize", steps=500, eval_every=10, batch=64)
    low = run_attack(cfg, enc, train, val, default_init(cfg, 64))
    ratio_min = low.train[-1] / low.train[0]
    band = float(np.max(np.abs(low.train - low.val) / (1 + low.train)))
    cfg = AttackConfig(mode="maximize", steps=200, eval_every=200, batch=64, squash="clip")
    high = run_attack(cfg, enc, train, val, default_init(cfg, 64, target))
    ratio_max = high.val[-1] / high.val[0]
    elapsed = time.perf_counter() - start
    ok = ratio_min <= 0.05 and ratio_max >= 10 and band <= 0.5 and elapsed < 120
    acceptance("7 adversarial descent", ok,
               f"minimize {low.train[0]:.3f}->{low.train[-1]:.4f} ({ratio_min:.2%}); "
               f"maximize val x{ratio_max:.1f}; train/val band {band:.3f}; {elapsed:.1f}s")


def test_8_serialization(acceptance, tmp_path, capsys):
    rng = make_rng(8)
    exact = True
    for factor in (False, True):
        s = GaussianStats.from_samples(gaussian_matrix(rng, 7, 11), factor=factor)
        path = tmp_path / f"s{int(factor)}.bin"
        io.write_stats(path, s)
        exact &= io.stats_to_bytes(io.read_stats(path)) == path.read_bytes()

    fake = tmp_path / "fake.csv"
    io.write_samples_csv(fake, gaussian_matrix(rng, 7, 5))
    good = (tmp_path / "s0.bin").read_bytes()
    bad_magic = tmp_path / "magic.bin"
    bad_magic.write_bytes(b"XSTATS01" + good[8:])
    bad_dims = tmp_path / "dims.bin"
    bad_dims.write_bytes(good[:8] + (9).to_bytes(4, "little") + good[12:])
    codes = [main(["fid", str(fake), str(p)]) for p in (bad_magic, bad_dims)]
    capsys.readouterr()
    acceptance("8 serialization", exact and codes == [1, 1], f"byte-exact={exact}; corrupted exit codes {codes}")
