import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rfda_sketch import ZeroMatrix, pseudo_inverse, spectral_norm, thin_svd


def test_identity():
    svd = thin_svd(np.eye(3), 1e-12)
    assert svd.rank == 3
    np.testing.assert_array_equal(svd.sigma, [1, 1, 1])


def test_diagonal_rank_drop():
    svd = thin_svd(np.diag([2.0, 1.0, 0.0]), 1e-12)
    assert svd.rank == 2
    np.testing.assert_allclose(svd.sigma, [2, 1])


def test_low_rank_product():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 3)) @ rng.standard_normal((3, 8))
    svd = thin_svd(a)
    assert svd.rank == 3
    assert np.linalg.norm(svd.reconstruct() - a) <= 1e-8 * np.linalg.norm(a)


def test_zero_matrix_raises():
    with pytest.raises(ZeroMatrix):
        thin_svd(np.zeros((2, 3)))


def test_rank_tol_range():
    with pytest.raises(ValueError):
        thin_svd(np.eye(2), 0.0)


def test_zero_column_gets_zero_row_in_v():
    a = np.array([[1.0, 0.0, 2.0], [3.0, 0.0, -1.0]])
    svd = thin_svd(a)
    assert np.all(svd.v[1] == 0.0)


@pytest.mark.parametrize("a, expected", [
    (np.zeros((2, 2)), 0.0),
    (np.diag([3.0, 1.0]), 3.0),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0),
])
def test_spectral_norm_examples(a, expected):
    assert spectral_norm(a) == pytest.approx(expected, abs=1e-14)


def test_spectral_norm_matches_svd_random():
    rng = np.random.default_rng(1)
    for _ in range(5):
        a = rng.standard_normal((20, 30))
        ref = scipy.linalg.svdvals(a, check_finite=True)[0]
        assert spectral_norm(a) == pytest.approx(ref, rel=1e-10)
        assert spectral_norm(a) == pytest.approx(thin_svd(a).sigma.max(), rel=1e-10)


def test_pinv_examples():
    np.testing.assert_allclose(pseudo_inverse(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    q, _ = np.linalg.qr(np.random.default_rng(2).standard_normal((3, 2)))
    np.testing.assert_allclose(pseudo_inverse(q), q.T, atol=1e-14)
    np.testing.assert_array_equal(pseudo_inverse(np.zeros((2, 3))), np.zeros((3, 2)))


finite = st.one_of(st.just(0.0), st.floats(1e-6, 10), st.floats(-10, -1e-6))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=finite))
def test_svd_invariants(a):
    if not np.any(a):
        return
    svd = thin_svd(a)
    rho = svd.rank
    assert np.linalg.norm(svd.u.T @ svd.u - np.eye(rho)) <= 1e-10 * rho
    assert np.linalg.norm(svd.v.T @ svd.v - np.eye(rho)) <= 1e-10 * rho
    assert np.all(svd.sigma > 0) and np.all(np.diff(svd.sigma) <= 0)
    assert np.linalg.norm(svd.reconstruct() - a) <= 1e-8 * np.linalg.norm(a)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=finite))
def test_moore_penrose(a):
    p = pseudo_inverse(a)
    scale = max(spectral_norm(a), 1.0)
    assert np.linalg.norm(a @ p @ a - a) <= 1e-8 * max(np.linalg.norm(a), 1e-300) + 1e-12
    tol = 1e-8 * scale
    assert np.allclose(p @ a @ p, p, atol=tol * max(1, np.abs(p).max()))
    assert np.allclose((a @ p).T, a @ p, atol=tol)
    assert np.allclose((p @ a).T, p @ a, atol=tol)
