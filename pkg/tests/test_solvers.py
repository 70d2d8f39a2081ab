import numpy as np
import pytest

from rfda_sketch import (NonPositiveLambda, RankTooLarge, evd_projection, exact_g, exact_pinv_f,
                         thin_svd)

from conftest import dataset_from_matrix, random_centered


def test_zero_data():
    ds = dataset_from_matrix(np.zeros((4, 6)), [0, 1, 0, 1])
    assert not np.any(exact_g(ds, 1.0).g)
    model = evd_projection(ds, 1.0)
    assert model.x.shape == (6, 0) and model.q == 0
    assert not np.any(model.m_matrix)


def test_identity_data():
    ds = dataset_from_matrix(np.eye(5), [0, 1, 2, 0, 1])
    np.testing.assert_allclose(exact_g(ds, 1.0).g, ds.omega / 2, atol=1e-15)


def test_nonpositive_lambda():
    ds = random_centered(5, 8, 2, 0)
    for lam in (0.0, -1.0):
        with pytest.raises(NonPositiveLambda):
            exact_g(ds, lam)
        with pytest.raises(NonPositiveLambda):
            evd_projection(ds, lam)


def _feature_side(ds, lam):
    a = ds.a
    return np.linalg.solve(a.T @ a + lam * np.eye(ds.d), a.T @ ds.omega)


@pytest.mark.parametrize("seed", range(10))
def test_matches_feature_side_solve(seed):
    ds = random_centered(6, 15, 3, seed)
    g = exact_g(ds, 0.5).g
    ref = _feature_side(ds, 0.5)
    assert np.linalg.norm(g - ref) <= 1e-9 * np.linalg.norm(ref)


@pytest.mark.parametrize("n,d,lam", [(20, 200, 1e-3), (30, 50, 10.0), (12, 12, 1.0)])
def test_matches_feature_side_larger(n, d, lam):
    ds = random_centered(n, d, 4, n + d)
    ref = _feature_side(ds, lam)
    est = exact_g(ds, lam)
    assert np.linalg.norm(est.g - ref) <= 1e-9 * np.linalg.norm(ref)
    # columns lie in the row space of A
    v = thin_svd(ds.a).v
    assert np.linalg.norm(est.g - v @ (v.T @ est.g)) <= 1e-8 * np.linalg.norm(est.g)


def test_homogeneity():
    ds = random_centered(8, 20, 2, 1)
    scaled = dataset_from_matrix(2.0 * ds.a, ds.labels)
    np.testing.assert_allclose(exact_g(scaled, 4 * 0.7).g, exact_g(ds, 0.7).g / 2, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_evd_projection_gram(seed):
    ds = random_centered(8, 20, 4, seed)
    g = exact_g(ds, 0.3).g
    model = evd_projection(ds, 0.3)
    gg = g @ g.T
    assert np.linalg.norm(model.x @ model.x.T - gg) <= 1e-10 * np.linalg.norm(gg)
    m = model.m_matrix
    assert np.allclose(m, m.T, atol=1e-12) and np.min(np.linalg.eigvalsh(m)) >= -1e-10
    assert model.q <= ds.c


def test_evd_projection_distances():
    ds = random_centered(8, 20, 4, 7)
    g = exact_g(ds, 1.0).g
    x = evd_projection(ds, 1.0).x
    rng = np.random.default_rng(0)
    for _ in range(10):
        diff = rng.standard_normal(ds.d) - rng.standard_normal(ds.d)
        assert np.linalg.norm(diff @ x) == pytest.approx(np.linalg.norm(diff @ g), rel=1e-9)


def test_pinv_unit_singular_values():
    rng = np.random.default_rng(0)
    u, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    v, _ = np.linalg.qr(rng.standard_normal((9, 4)))
    ds = dataset_from_matrix(u @ v.T, [0, 1, 0, 1])
    np.testing.assert_allclose(exact_pinv_f(ds, 4).g, v @ u.T @ ds.omega, atol=1e-13)


def test_pinv_rank_one():
    u = np.array([0.6, 0.8, 0.0])
    v = np.array([1.0, 2.0, 2.0, 0.0]) / 3
    ds = dataset_from_matrix(3.0 * np.outer(u, v), [0, 1, 1])
    np.testing.assert_allclose(exact_pinv_f(ds, 1).g, np.outer(v, u @ ds.omega) / 3, atol=1e-15)


def test_pinv_brute_force():
    ds = random_centered(6, 15, 3, 4)
    u, s, vt = np.linalg.svd(ds.a, full_matrices=False)
    a_k = (u[:, :2] * s[:2]) @ vt[:2]
    ref = a_k.T @ np.linalg.pinv(a_k @ a_k.T) @ ds.omega
    f = exact_pinv_f(ds, 2).g
    assert np.linalg.norm(f - ref) <= 1e-9 * np.linalg.norm(ref)
    v_k = vt[:2].T
    assert np.linalg.norm(f - v_k @ (v_k.T @ f)) <= 1e-12 * np.linalg.norm(f)


def test_pinv_rank_too_large():
    ds = random_centered(6, 15, 3, 4)
    rho = thin_svd(ds.a).rank
    for k in (0, rho + 1):
        with pytest.raises(RankTooLarge):
            exact_pinv_f(ds, k)
    with pytest.raises(RankTooLarge):
        exact_pinv_f(dataset_from_matrix(np.zeros((2, 3)), [0, 1]), 1)
