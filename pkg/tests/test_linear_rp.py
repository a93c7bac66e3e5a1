import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sketchbench import linear_rp as lrp
from sketchbench.errors import InvalidParameterError, ShapeError, SingularMatrixError
from sketchbench.linalg import interpolation_norm
from sketchbench.random_matrices import GAUSSIAN, sample_projection, sample_sign_diagonal


# ---- projection, hat matrix, reconstruction ---------------------------------


def test_identity_projection(rng):
    X = rng.normal(size=(5, 7))
    assert np.array_equal(lrp.project(X, np.eye(5)), X)


def test_hand_inner_product():
    assert np.allclose(lrp.project([[1.0], [1.0]], np.array([[1.0], [-1.0]])), [[0.0]])


def test_all_plus_flip_is_noop(rng):
    X = rng.normal(size=(6, 4))
    U = sample_projection(6, 3, GAUSSIAN, 2)
    assert np.array_equal(lrp.project(X, U, sign_flip=np.ones(6)), lrp.project(X, U))


def test_sign_flip_applies_signs(rng):
    X = rng.normal(size=(6, 4))
    U = sample_projection(6, 3, GAUSSIAN, 2)
    s = sample_sign_diagonal(6, 1)
    assert np.allclose(lrp.project(X, U, sign_flip=s), U.mat.T @ (s.entries[:, None] * X))


def test_project_shape_errors(rng):
    with pytest.raises(ShapeError):
        lrp.project(rng.normal(size=(4, 2)), np.eye(3))
    with pytest.raises(ShapeError):
        lrp.project(rng.normal(size=(3, 2)), np.eye(3), sign_flip=np.ones(2))


def test_normalized_scaling(rng):
    X = rng.normal(size=(6, 4))
    M = rng.normal(size=(6, 4))
    assert np.allclose(lrp.project(X, M, normalized=True), M.T @ X / 2.0)


def test_hat_matrix_examples():
    assert np.allclose(lrp.hat_matrix(np.array([[1.0], [0.0]])), np.diag([1.0, 0.0]))
    assert np.allclose(lrp.hat_matrix(np.array([[1.0], [1.0]])), [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_hat_matrix_rank_deficient():
    with pytest.raises(SingularMatrixError):
        lrp.hat_matrix(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))


def test_hat_matrix_orthonormal_equals_uut(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(6, 3)))
    assert np.allclose(lrp.hat_matrix(Q), Q @ Q.T, atol=1e-12)


@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.data())
def test_hat_matrix_idempotent_symmetric(d, seed, data):
    p = data.draw(st.integers(1, d))
    U = np.random.default_rng(seed).normal(size=(d, p))
    P = lrp.hat_matrix(U)
    assert np.allclose(P @ P, P, atol=1e-10)
    assert np.allclose(P, P.T, atol=1e-10)


def test_reconstruct_examples(rng):
    e1 = np.array([[1.0], [0.0]])
    assert np.allclose(lrp.reconstruct(lrp.project([[1.0], [1.0]], e1), e1), [[1.0], [0.0]])
    Q, _ = np.linalg.qr(rng.normal(size=(7, 3)))
    X = Q @ rng.normal(size=(3, 5))
    assert np.allclose(lrp.reconstruct(lrp.project(X, Q), Q), X, atol=1e-10)
    Y = rng.normal(size=(4, 2))
    assert np.allclose(lrp.reconstruct(Y, np.eye(4)), Y)
    with pytest.raises(ShapeError):
        lrp.reconstruct(Y, np.eye(3))


@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_projection_linearity(seed, a, b):
    g = np.random.default_rng(seed)
    X, Y = g.normal(size=(2, 8, 3))
    U = sample_projection(8, 4, GAUSSIAN, seed)
    lhs = lrp.project(a * X + b * Y, U)
    rhs = a * lrp.project(X, U) + b * lrp.project(Y, U)
    assert np.allclose(lhs, rhs, atol=1e-9)


# ---- bounds -----------------------------------------------------------------


def test_jl_min_dimension_examples():
    assert lrp.jl_min_dimension(1000, 0.2) == 1595
    assert lrp.jl_min_dimension(2, 0.5) == 34
    assert lrp.jl_min_dimension(10_000, 0.3) >= lrp.jl_min_dimension(1000, 0.3)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
def test_jl_min_dimension_rejects_epsilon(eps):
    with pytest.raises(InvalidParameterError):
        lrp.jl_min_dimension(100, eps)


def test_jl_failure_bound_values():
    # 2 exp(-(0.01 - 0.001) * 1024 / 4) evaluated directly
    assert lrp.jl_failure_bound(1024, 0.1) == pytest.approx(2 * math.exp(-2.304), rel=1e-12)
    assert lrp.jl_failure_bound(1024, 0.1) == pytest.approx(0.199717, abs=1e-6)
    assert lrp.jl_failure_bound(4, 0.5) == 1.0
    vals = [lrp.jl_failure_bound(p, 0.3) for p in (10, 100, 1000, 10_000)]
    assert all(b < a for a, b in zip(vals[1:], vals[2:])) and vals[-1] < 1e-30


def test_union_bound_grows_with_n():
    assert lrp.JlParams.for_data(100, 0.3, 500).union_bound < lrp.JlParams.for_data(200, 0.3, 500).union_bound


# ---- distortion -------------------------------------------------------------


def test_distortion_identity_and_duplicates(rng):
    X = rng.normal(size=(5, 6))
    X[:, 3] = X[:, 1]
    rep = lrp.distortion_report(X, X, 0.1)
    assert rep.pairs_below == rep.pairs_above == 0
    assert rep.max_distortion == 0.0
    assert rep.pairs_zero_distance == 1
    assert rep.pairs_measured == rep.pairs_total - 1


def test_distortion_needs_two_points(rng):
    with pytest.raises(InvalidParameterError):
        lrp.distortion_report(rng.normal(size=(3, 1)), rng.normal(size=(2, 1)), 0.1)


def test_distortion_counts_match_bruteforce(rng):
    X = rng.normal(size=(20, 12))
    Y = lrp.project(X, sample_projection(20, 6, GAUSSIAN, 3))
    rep = lrp.distortion_report(X, Y, 0.3)
    below = above = 0
    worst = 0.0
    for i in range(12):
        for j in range(i + 1, 12):
            r = np.sum((Y[:, i] - Y[:, j]) ** 2) / np.sum((X[:, i] - X[:, j]) ** 2)
            below += r < 0.7
            above += r > 1.3
            worst = max(worst, abs(r - 1))
    assert (rep.pairs_below, rep.pairs_above) == (below, above)
    assert rep.max_distortion == pytest.approx(worst, rel=1e-12)


def test_distortion_gaussian_projection_within_union_slack():
    X = np.random.default_rng(0).normal(size=(1000, 200))
    p = lrp.jl_min_dimension(200, 0.5)
    rep = lrp.distortion_report(X, lrp.project(X, sample_projection(1000, p, GAUSSIAN, 1)), 0.5)
    assert rep.violation_fraction <= 3 * rep.theoretical_pair_delta


# ---- Monte Carlo checks -----------------------------------------------------


def test_expectation_identity():
    x = np.random.default_rng(3).normal(size=12)
    res = lrp.expectation_preservation_check(x, 16, 100_000, 0)
    assert abs(res["mean_ratio"] - 1.0) <= 0.02


def test_expectation_identity_scale_invariant():
    x = np.random.default_rng(3).normal(size=12)
    a = lrp.expectation_preservation_check(x, 16, 20_000, 1)["mean_ratio"]
    b = lrp.expectation_preservation_check(2 * x, 16, 20_000, 2)["mean_ratio"]
    assert abs(a - b) <= 0.02


def test_expectation_identity_p1():
    x = np.random.default_rng(4).normal(size=5)
    assert abs(lrp.expectation_preservation_check(x, 1, 100_000, 5)["mean_ratio"] - 1.0) <= 0.1


def test_expectation_rejects_zero_and_few_trials():
    with pytest.raises(InvalidParameterError):
        lrp.expectation_preservation_check(np.zeros(3), 4, 1000, 0)
    with pytest.raises(InvalidParameterError):
        lrp.expectation_preservation_check(np.ones(3), 4, 99, 0)


def test_chi_square_bound_value():
    assert lrp.chi_square_tail_bound(20, 0.5) == pytest.approx(math.exp(10 * (0.5 + math.log(0.5))), rel=1e-12)
    assert lrp.chi_square_tail_bound(20, 0.5) == pytest.approx(0.144935, abs=1e-6)
    assert lrp.chi_square_tail_bound(20, 1.0) == 1.0
    with pytest.raises(InvalidParameterError):
        lrp.chi_square_tail_check(20, 400, 1.0, 1000, 0)


def test_chi_square_upper_tail():
    res = lrp.chi_square_tail_check(10, 100, 2.0, 20_000, 1)
    assert res["empirical_prob"] <= res["bound"] + 3 * res["std_error"]


def test_chi_square_mean_length():
    # E[L] = p / d for a random p-dimensional subspace
    res_lo = lrp.chi_square_tail_check(20, 400, 0.999, 20_000, 2)
    res_hi = lrp.chi_square_tail_check(20, 400, 1.001, 20_000, 2)
    assert 0.4 < res_lo["empirical_prob"] < 0.65
    assert abs(res_lo["empirical_prob"] + res_hi["empirical_prob"] - 1.0) < 0.05


def test_rip_full_support_is_plain_concentration():
    U = sample_projection(16, 2000, GAUSSIAN, 4)
    res = lrp.rip_check(U, 16, 0.2, 200, 0)
    assert res["violating_fraction"] <= 0.05


def test_rip_threshold_dimension():
    p = lrp.rip_dimension(256, 4, 0.5)
    assert p == math.ceil(4 * 4 * math.log(64))
    res = lrp.rip_check(sample_projection(256, p, GAUSSIAN, 0), 4, 0.5, 1000, 1)
    assert res["violating_fraction"] <= 0.05


def test_rip_orthonormal_k1_isometry(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(32, 32)))
    assert lrp.rip_check(Q, 1, 0.01, 500, 0)["violating_fraction"] <= 0.01


def test_rip_rejects_bad_k():
    with pytest.raises(InvalidParameterError):
        lrp.rip_check(np.eye(4), 0, 0.5, 10, 0)


def test_sparse_vectors_are_unit_and_sparse(rng):
    X = lrp.sample_sparse_unit_vectors(30, 3, 50, rng)
    assert np.allclose(np.linalg.norm(X, axis=0), 1.0)
    assert np.all(np.count_nonzero(X, axis=0) <= 3)


# ---- interpolation embedding ------------------------------------------------


def test_interpolation_sparse_precheck(rng):
    v = np.zeros(64)
    v[rng.choice(64, 5, replace=False)] = rng.normal(size=5)
    assert interpolation_norm(v, 64) == pytest.approx(np.abs(v).sum(), abs=1e-12)
    assert interpolation_norm(v, 8) == pytest.approx(np.abs(v).sum(), abs=1e-12)


def test_interpolation_basis_vector_degenerates():
    e = np.zeros(64)
    e[5] = 1.0
    assert interpolation_norm(e, 8) == 1.0
    res = lrp.interpolation_embedding_check(e, 8, 0.2, 512, 50, 0)
    assert res["lo_violations"] == res["hi_violations"] == 0


def test_interpolation_check_flags_dense_block_norm():
    v = np.random.default_rng(7).normal(size=64)
    res = lrp.interpolation_embedding_check(v, 8, 0.2, 512, 50, 0)
    assert res["flagged"]
    assert res["lo_violations"] > 0


@pytest.mark.xfail(
    strict=True,
    reason="dense Gaussian maps scaled 1/p give |U^T v|_1 near 0.8 |v|_2, far below 0.63 of the "
    "block norm once block > 1; the constants are reported, not met (see decisions ledger)",
)
def test_interpolation_embedding_constants_dense_gaussian():
    v = np.random.default_rng(8).normal(size=64)
    res = lrp.interpolation_embedding_check(v, 8, 0.2, 512, 200, 0)
    assert res["lo_violations"] / 200 <= 0.1 and res["hi_violations"] / 200 <= 0.1


# ---- norm concentration -----------------------------------------------------


def test_norm_gap_trends():
    ds = [10, 100, 1000]
    g1 = [g for _, g in lrp.norm_concentration_experiment(100, ds, 1, 0)]
    g2 = [g for _, g in lrp.norm_concentration_experiment(100, ds, 2, 0)]
    g4 = [g for _, g in lrp.norm_concentration_experiment(100, ds, 4, 0)]
    assert g1[0] < g1[1] < g1[2]
    assert 0.5 <= g2[2] / g2[0] <= 2.0
    assert g4[0] > g4[1] > g4[2]


def test_norm_gap_rejects_unsorted():
    with pytest.raises(InvalidParameterError):
        lrp.norm_concentration_experiment(10, [100, 10], 2, 0)
