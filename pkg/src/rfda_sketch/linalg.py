"""Dense kernels: thin SVD, spectral norm and SVD-based pseudo-inverse.

The factorizations are delegated to LAPACK through numpy; this module only
fixes the rank-detection rule and the conventions the rest of the package
relies on.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ZeroMatrix

DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True)
class ThinSvd:
    """Factors of ``a = u @ diag(sigma) @ v.T`` restricted to the numerical rank."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    def truncate(self, k):
        return ThinSvd(self.u[:, :k], self.sigma[:k], self.v[:, :k])

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T


def as_matrix(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def thin_svd(a, rank_tol=DEFAULT_RANK_TOL):
    """Thin SVD keeping singular values above ``rank_tol * sigma_1``.

    Raises ZeroMatrix when ``a`` has no nonzero singular value.
    """
    if not 0 < rank_tol < 1:
        raise ValueError("rank_tol must lie in (0, 1)")
    a = as_matrix(a)
    if a.size == 0:
        raise ZeroMatrix("empty matrix has no thin SVD")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        raise ZeroMatrix("rank-0 matrix has no thin SVD")
    rho = int(np.count_nonzero(s > rank_tol * s[0]))
    u = u[:, :rho].copy()
    v = vt[:rho].T.copy()
    # all-zero rows/columns of a lie outside the singular subspaces exactly
    u[~a.any(axis=1)] = 0.0
    v[~a.any(axis=0)] = 0.0
    return ThinSvd(u, s[:rho].copy(), v)


def spectral_norm(a):
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def pseudo_inverse(a, rank_tol=DEFAULT_RANK_TOL):
    """Moore-Penrose inverse ``V diag(1/sigma) U^T``; the zero matrix maps to zero."""
    a = as_matrix(a)
    try:
        svd = thin_svd(a, rank_tol)
    except ZeroMatrix:
        return np.zeros(a.shape[::-1])
    return (svd.v / svd.sigma) @ svd.u.T
