import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fidkit.engine import frechet_distance
from fidkit.errors import DimensionError, NumericalError
from fidkit.linalg import gaussian_matrix, make_rng
from fidkit.stats import (
    CenteredFactor,
    GaussianStats,
    assemble_fid,
    center_factor,
    fid_diag_only,
    fid_mean_only,
    sample_mean,
    trace_cov,
)

from oracles import covariance_loops, diag_frechet_loop, fsum_mean


def test_sample_mean_two_columns():
    assert np.array_equal(sample_mean([[1.0, 3.0], [1.0, 3.0]]), [2.0, 2.0])


def test_sample_mean_constant():
    c = np.array([0.3, -1.7, 2.5])
    x = np.repeat(c[:, None], 5, axis=1)
    assert np.allclose(sample_mean(x), c, rtol=0, atol=1e-15)


def test_sample_mean_compensated_oracle():
    x = gaussian_matrix(make_rng(16), 16, 64) * 100 + 3
    assert np.allclose(sample_mean(x), fsum_mean(x), rtol=1e-13, atol=0)


def test_sample_mean_empty():
    with pytest.raises(DimensionError):
        sample_mean(np.zeros((3, 0)))


def test_center_factor_two_points():
    c = center_factor(np.array([[0.0, 2.0], [0.0, 0.0]]))
    assert np.allclose(c.values, [[-1, 1], [0, 0]])
    assert np.allclose(c.covariance(), [[2, 0], [0, 0]])


def test_center_factor_constant_columns():
    x = np.repeat(np.array([[1.0], [4.0]]), 6, axis=1)
    c = center_factor(x)
    assert np.array_equal(c.values, np.zeros((2, 6)))


def test_center_factor_covariance_loop_oracle():
    x = gaussian_matrix(make_rng(32), 8, 32)
    assert np.allclose(center_factor(x).covariance(), covariance_loops(x), rtol=1e-12, atol=1e-12)


def test_center_factor_rows_sum_to_zero():
    x = gaussian_matrix(make_rng(1), 10, 40) * 7 + 5
    v = center_factor(x).values
    assert np.all(np.abs(v.sum(axis=1)) <= 1e-9 * np.sqrt(40) * np.abs(v).max(axis=1))


def test_center_factor_needs_two_samples():
    with pytest.raises(DimensionError):
        center_factor(np.ones((3, 1)))


def test_trace_cov_cases():
    assert trace_cov(CenteredFactor(np.zeros((3, 4)))) == 0.0
    assert trace_cov(CenteredFactor(np.array([[1.0, 0.0], [0.0, 2.0]]))) == 5.0


def test_trace_cov_matches_explicit_product():
    c = center_factor(gaussian_matrix(make_rng(3), 12, 20))
    explicit = np.trace(c.values @ c.values.T)
    assert math.isclose(trace_cov(c), explicit, rel_tol=1e-12)


def test_assemble_identical():
    mu = np.zeros(3)
    assert assemble_fid(mu, mu, 3.0, 3.0, 3.0).total == 0.0


def test_assemble_diagonal_closed_form():
    b = assemble_fid(np.zeros(2), np.zeros(2), 5.0, 25.0, math.sqrt(9) + math.sqrt(64))
    assert b.tr_sqrt == 11.0
    assert b.total == 8.0


def test_assemble_mean_shift():
    b = assemble_fid(np.array([2.0, 0.0]), np.zeros(2), 2.0, 2.0, 2.0)
    assert b.mean_sq_diff == 4.0 and b.total == 4.0


def test_assemble_clamps_negative_raw():
    b = assemble_fid(np.zeros(2), np.zeros(2), 1.0, 1.0, 1.0 + 1e-12)
    assert b.raw_total < 0 and b.total == 0.0


def test_assemble_rejects_negative_trace():
    with pytest.raises(ValueError):
        assemble_fid(np.zeros(2), np.zeros(2), -1.0, 1.0, 0.0)


def test_mean_only():
    s = GaussianStats(np.zeros(2), np.eye(2))
    assert fid_mean_only(s, s) == 0.0
    assert fid_mean_only(GaussianStats(np.array([3.0, 4.0]), np.eye(2)), s) == 25.0


def test_mean_only_is_fid_without_covariance_terms(rng):
    s1 = GaussianStats.from_samples(rng.standard_normal((6, 20)) + 1)
    s2 = GaussianStats.from_samples(rng.standard_normal((6, 30)))
    full = frechet_distance(s1, s2)
    rest = full.tr_sigma1 + full.tr_sigma2 - 2 * full.tr_sqrt
    assert math.isclose(fid_mean_only(s1, s2), full.raw_total - rest, rel_tol=1e-12)


def test_mean_only_dimension_mismatch():
    with pytest.raises(DimensionError):
        fid_mean_only(GaussianStats(np.zeros(2), np.eye(2)), GaussianStats(np.zeros(3), np.eye(3)))


def test_diag_only_equals_full_for_diagonal():
    s1 = GaussianStats(np.array([1.0, 0.0]), np.diag([1.0, 4.0]))
    s2 = GaussianStats(np.zeros(2), np.diag([9.0, 16.0]))
    assert math.isclose(fid_diag_only(s1, s2), 1.0 + 8.0, rel_tol=1e-15)
    assert math.isclose(frechet_distance(s1, s2, "baseline").total, 9.0, rel_tol=1e-12)


def test_diag_only_nonnegative_for_equal_nondiagonal():
    sigma = np.array([[2.0, 0.9], [0.9, 1.0]])
    s = GaussianStats(np.zeros(2), sigma)
    assert fid_diag_only(s, s) >= 0.0


def test_diag_only_loop_oracle():
    rng = make_rng(4)
    s1 = GaussianStats.from_samples(gaussian_matrix(rng, 4, 10))
    s2 = GaussianStats.from_samples(gaussian_matrix(rng, 4, 12) * 2, factor=False)
    ref = diag_frechet_loop(s1.mu, np.diag(s1.dense), s2.mu, np.diag(s2.dense))
    assert math.isclose(fid_diag_only(s1, s2), ref, rel_tol=1e-12)


def test_diag_only_rejects_negative_variance():
    s1 = GaussianStats(np.zeros(2), np.diag([1.0, -1.0]))
    s2 = GaussianStats(np.zeros(2), np.eye(2))
    with pytest.raises(NumericalError):
        fid_diag_only(s1, s2)


def test_stats_reject_asymmetric():
    with pytest.raises(NumericalError):
        GaussianStats(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_stats_dimension_checks():
    with pytest.raises(DimensionError):
        GaussianStats(np.zeros(3), np.eye(2))
    with pytest.raises(DimensionError):
        GaussianStats(np.zeros(3), CenteredFactor(np.ones((2, 4))))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.integers(2, 30), st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_distance_properties(d, m, n, seed):
    rng = make_rng(seed)
    s1 = GaussianStats.from_samples(rng.standard_normal((d, m)) * rng.uniform(0.1, 3))
    s2 = GaussianStats.from_samples(rng.standard_normal((d, n)) + rng.uniform(-1, 1))
    ab, ba = frechet_distance(s1, s2), frechet_distance(s2, s1)
    assert abs(ab.total - ba.total) <= 1e-8 * max(ab.total, 1.0)
    for b in (ab, ba):
        assert b.raw_total >= -b.tolerance
    self_dist = frechet_distance(s1, s1)
    assert self_dist.total <= 1e-8 * (s1.trace() + 1)
