"""Exact RFDA solutions used as references for the sketched solvers."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonPositiveLambda, RankTooLarge, ZeroMatrix
from .linalg import DEFAULT_RANK_TOL, thin_svd


@dataclass(frozen=True)
class RfdaEstimate:
    """A ``d x c`` projection matrix together with how it was obtained.

    ``lam`` is set for the ridge problem, ``k`` for the rank-k pseudo-inverse
    variant. ``trace`` holds per-iteration diagnostics for iterative solvers.
    """

    g: np.ndarray
    lam: Optional[float] = None
    k: Optional[int] = None
    iterations: int = 1
    trace: Optional[object] = None


@dataclass(frozen=True)
class ProjectionModel:
    x: np.ndarray
    m_matrix: np.ndarray

    @property
    def q(self):
        return self.x.shape[1]


def _svd_or_none(a, svd):
    if svd is not None:
        return svd
    try:
        return thin_svd(a)
    except ZeroMatrix:
        return None


def exact_g(ds, lam, svd=None):
    """``G = A^T (A A^T + lam I)^{-1} Omega`` evaluated through the thin SVD of A.

    Equivalent to ``(A^T A + lam I)^{-1} A^T Omega``; no d x d system is formed.
    """
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    svd = _svd_or_none(ds.a, svd)
    if svd is None:
        return RfdaEstimate(np.zeros((ds.d, ds.c)), lam=float(lam))
    shrink = svd.sigma / (svd.sigma ** 2 + lam)
    g = (svd.v * shrink) @ (svd.u.T @ ds.omega)
    return RfdaEstimate(g, lam=float(lam))


def evd_projection(ds, lam, svd=None, rank_tol=DEFAULT_RANK_TOL):
    """Discriminant directions ``X = G V_M`` from the eigenvectors of ``M = Omega^T A G``.

    ``X X^T = G G^T``, so distances between projected points agree with those
    obtained from ``G``.
    """
    g = exact_g(ds, lam, svd).g
    m = ds.omega.T @ (ds.a @ g)
    m = (m + m.T) / 2
    try:
        m_svd = thin_svd(m, rank_tol)
    except ZeroMatrix:
        return ProjectionModel(np.zeros((ds.d, 0)), m)
    return ProjectionModel(g @ m_svd.v, m)


def exact_pinv_f(ds, k, svd=None):
    """``F = A_k^T (A_k A_k^T)^+ Omega = V_k diag(1/sigma_k) U_k^T Omega``."""
    svd = _svd_or_none(ds.a, svd)
    rho = 0 if svd is None else svd.rank
    if not 1 <= k <= rho:
        raise RankTooLarge(f"k={k} must lie in 1..{rho}")
    top = svd.truncate(k)
    f = (top.v / top.sigma) @ (top.u.T @ ds.omega)
    return RfdaEstimate(f, k=int(k))
