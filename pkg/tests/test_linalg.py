import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sketchbench.errors import InvalidParameterError, ShapeError
from sketchbench.linalg import (
    frobenius_norm,
    hamming_distance,
    interpolation_norm,
    lp_norm,
    svd,
)
from oracles import jacobi_eigenvalues

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(1, 30), elements=finite)


def test_lp_norm_examples():
    assert lp_norm([3, 4], 2) == 5.0
    assert lp_norm([3, 4], 1) == 7.0
    assert lp_norm([1, -2, 2], math.inf) == 2.0


def test_lp_norm_rejects_small_r():
    with pytest.raises(InvalidParameterError):
        lp_norm([1.0, 2.0], 0.5)


def test_interpolation_norm_examples():
    v = [3, 1, 2, 4]
    assert interpolation_norm(v, 1) == pytest.approx(math.sqrt(30), abs=1e-12)
    assert interpolation_norm(v, 4) == pytest.approx(10.0, abs=1e-12)
    # blocks {4, 3} and {2, 1}
    assert interpolation_norm(v, 2) == pytest.approx(math.sqrt(58), abs=1e-12)


@pytest.mark.parametrize("block", [0, 5, 2.5])
def test_interpolation_norm_rejects_bad_block(block):
    with pytest.raises(InvalidParameterError):
        interpolation_norm([3, 1, 2, 4], block)


def test_frobenius_examples():
    assert frobenius_norm(np.eye(2)) == pytest.approx(math.sqrt(2))
    assert frobenius_norm(np.zeros((3, 2))) == 0.0
    assert frobenius_norm([[1, 2], [3, 4]]) == pytest.approx(math.sqrt(30))


def test_hamming_examples():
    assert hamming_distance([0, 1, 1, 0], [1, 1, 0, 0]) == 2
    assert hamming_distance([1, 0, 1], [1, 0, 1]) == 0
    assert hamming_distance([0, 0, 0, 0], [1, 1, 1, 1]) == 4
    with pytest.raises(ShapeError):
        hamming_distance([0, 1], [0, 1, 1])


def test_svd_small_examples():
    assert np.allclose(svd(np.diag([3.0, 4.0])).singular, [4.0, 3.0], atol=1e-14)
    assert np.allclose(svd([[0.0, 1.0], [1.0, 0.0]]).singular, [1.0, 1.0], atol=1e-14)


def test_svd_matches_independent_eigen_oracle(rng):
    M = rng.normal(size=(4, 3))
    eig = jacobi_eigenvalues(M.T @ M)
    assert np.allclose(svd(M).singular, np.sqrt(np.maximum(eig, 0)), atol=1e-9)


def test_svd_wide_and_rank_deficient(rng):
    M = rng.normal(size=(3, 1)) @ rng.normal(size=(1, 7))
    res = svd(M)
    assert res.left.shape == (3, 3) and res.right.shape == (7, 3)
    assert np.allclose(res.reconstruct(), M, atol=1e-10)
    assert np.allclose(res.right.T @ res.right, np.eye(3), atol=1e-10)
    assert np.allclose(res.left.T @ res.left, np.eye(3), atol=1e-10)
    assert res.singular[1] == 0.0


def test_svd_zero_matrix():
    res = svd(np.zeros((4, 3)))
    assert np.all(res.singular == 0)
    assert np.allclose(res.left.T @ res.left, np.eye(3), atol=1e-12)


def test_svd_rejects_nonfinite():
    with pytest.raises(InvalidParameterError):
        svd([[1.0, np.nan]])


@given(st.integers(1, 64), st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_svd_invariants(rows, cols, seed):
    M = np.random.default_rng(seed).normal(size=(rows, cols))
    res = svd(M)
    k = min(rows, cols)
    assert np.linalg.norm(M - res.reconstruct()) <= 1e-8 * max(1.0, np.linalg.norm(M))
    assert np.allclose(res.left.T @ res.left, np.eye(k), atol=1e-10)
    assert np.allclose(res.right.T @ res.right, np.eye(k), atol=1e-10)
    assert np.all(np.diff(res.singular) <= 0) and np.all(res.singular >= 0)


@given(vectors)
def test_norm_ordering(v):
    assert lp_norm(v, math.inf) <= lp_norm(v, 2) * (1 + 1e-12) + 1e-12
    assert lp_norm(v, 2) <= lp_norm(v, 1) * (1 + 1e-12) + 1e-12


@given(vectors, st.data())
def test_interpolation_norm_between_l2_and_l1(v, data):
    block = data.draw(st.integers(1, v.size))
    val = interpolation_norm(v, block)
    assert lp_norm(v, 2) <= val * (1 + 1e-12) + 1e-12
    assert val <= lp_norm(v, 1) * (1 + 1e-12) + 1e-12


bits = st.lists(st.integers(0, 1), min_size=1, max_size=40)


@given(st.data())
def test_hamming_is_a_metric(data):
    n = data.draw(st.integers(1, 40))
    a, b, c = (np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))) for _ in range(3))
    assert hamming_distance(a, b) == hamming_distance(b, a)
    assert (hamming_distance(a, b) == 0) == bool(np.array_equal(a, b))
    assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)


@pytest.mark.parametrize("shape", [(2, 5), (5, 2), (4, 4)])
def test_svd_leaves_input_untouched(rng, shape):
    M = rng.normal(size=shape)
    before = M.copy()
    svd(M)
    assert np.array_equal(M, before)
