"""Error metrics, bound checks, concentration experiments and classification."""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from .errors import EpsilonTooLarge, ShapeMismatch, SpectralNormExceedsOne, ZeroReference
from .linalg import as_matrix, spectral_norm, thin_svd
from .sketch import apply_sketch, build_sampling_operator


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _matrix_of(x):
    return x.g if hasattr(x, "g") else np.asarray(x, dtype=float)


def relative_error(estimate, reference):
    """``||estimate - reference||_F / ||reference||_F``."""
    est, ref = _matrix_of(estimate), _matrix_of(reference)
    if est.shape != ref.shape:
        raise ShapeMismatch(f"{est.shape} vs {ref.shape}")
    ref_norm = np.linalg.norm(ref)
    if ref_norm == 0:
        raise ZeroReference("reference has zero norm")
    return float(np.linalg.norm(est - ref) / ref_norm)


def _check(lhs, rhs):
    return BoundCheck(float(lhs), float(rhs), bool(lhs <= rhs * (1 + 1e-9)))


def distortion_bound_check(w, ds, estimate, reference, epsilon, t, lam, constant=1.0, svd=None):
    """Compare ``||(w-m)^T (G_hat - G)||`` with ``constant * eps^t / sqrt(lam) * ||V V^T (w-m)||``.

    ``constant`` is 1 under the ridge structural condition and 1/2 under the
    plain one.
    """
    if not epsilon < 1:
        raise EpsilonTooLarge(f"measured epsilon {epsilon} >= 1; the bound does not apply")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    svd = thin_svd(ds.a) if svd is None else svd
    x = np.asarray(w, dtype=float) - ds.grand_mean
    lhs = np.linalg.norm(x @ (_matrix_of(estimate) - _matrix_of(reference)))
    proj = np.linalg.norm(svd.v @ (svd.v.T @ x))
    return _check(lhs, constant * epsilon ** t / math.sqrt(lam) * proj)


def pinv_bound_check(w, ds, estimate, reference, epsilon, t, k, svd=None):
    """Compare ``||(w-m)^T (F_hat - F)||`` with ``eps^t / sigma_k * ||V_k V_k^T (w-m)||``."""
    if not epsilon < 1:
        raise EpsilonTooLarge(f"measured epsilon {epsilon} >= 1; the bound does not apply")
    svd = thin_svd(ds.a) if svd is None else svd
    v_k = svd.v[:, :k]
    x = np.asarray(w, dtype=float) - ds.grand_mean
    lhs = np.linalg.norm(x @ (_matrix_of(estimate) - _matrix_of(reference)))
    alpha = np.linalg.norm(v_k @ (v_k.T @ x))
    return _check(lhs, epsilon ** t / svd.sigma[k - 1] * alpha)


def lemma_sample_size(fro2, epsilon, delta):
    """Smallest integer ``s >= 8 f / (3 eps^2) * ln(4 (1 + f) / delta)`` with ``f = ||Z||_F^2``."""
    return int(math.ceil(8.0 * fro2 / (3.0 * epsilon ** 2) * math.log(4.0 * (1.0 + fro2) / delta)))


class ConcentrationResult(NamedTuple):
    s_used: int
    failure_rate: float


def _gram_error(zt, gram, probs, s, seed):
    op = build_sampling_operator(probs, s, seed)
    zs = apply_sketch(zt, op)
    diff = zs @ zs.T - gram
    return float(np.max(np.abs(np.linalg.eigvalsh((diff + diff.T) / 2))))


def matmul_concentration(z, epsilon, delta, trials, seed, workers=None, return_errors=False):
    """Empirical failure rate of row sampling for ``Z^T S S^T Z ~ Z^T Z``.

    ``z`` is ``d x n`` with spectral norm at most one. Rows are sampled with
    probability proportional to their squared norms and ``s`` is the smallest
    size the sampling lemma allows. A trial fails when the spectral error
    strictly exceeds ``epsilon``; trial ``i`` uses the stream ``(seed, i)``.
    With ``return_errors`` the per-trial spectral errors are returned as well.
    """
    z = as_matrix(z)
    if not 0 < epsilon <= 1 or not 0 < delta < 1:
        raise ValueError("need 0 < epsilon <= 1 and 0 < delta < 1")
    if spectral_norm(z) > 1 + 1e-12:
        raise SpectralNormExceedsOne("the sampling lemma needs ||Z||_2 <= 1")
    row_norms = np.einsum("ij,ij->i", z, z)
    fro2 = float(row_norms.sum())
    s = lemma_sample_size(fro2, epsilon, delta)
    zt = z.T
    gram = zt @ z
    run = lambda i: _gram_error(zt, gram, row_norms, s, (seed, i))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            errors = np.array(list(pool.map(run, range(trials))))
    else:
        errors = np.array([run(i) for i in range(trials)])
    result = ConcentrationResult(s, float(np.mean(errors > epsilon)))
    return (result, errors) if return_errors else result


def project(points, mean, g):
    """Rows ``(w - m)^T G`` for every row ``w`` of ``points``."""
    return (np.atleast_2d(points) - mean) @ _matrix_of(g)


def classify_nearest_centroid(train_proj, train_labels, test_proj, test_labels):
    """Accuracy of assigning each test row to the nearest training class centroid.

    Ties go to the lowest class id.
    """
    train_proj, test_proj = np.atleast_2d(train_proj), np.atleast_2d(test_proj)
    train_labels, test_labels = np.asarray(train_labels), np.asarray(test_labels)
    if train_proj.shape[1] != test_proj.shape[1]:
        raise ShapeMismatch(f"projection widths differ: {train_proj.shape[1]} vs {test_proj.shape[1]}")
    if train_labels.shape[0] != train_proj.shape[0] or test_labels.shape[0] != test_proj.shape[0]:
        raise ShapeMismatch("labels do not match the number of projected rows")
    classes = np.unique(train_labels)
    centroids = np.stack([train_proj[train_labels == k].mean(axis=0) for k in classes])
    dist = ((test_proj[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    predicted = classes[np.argmin(dist, axis=1)]
    return float(np.mean(predicted == test_labels))
