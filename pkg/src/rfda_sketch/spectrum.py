"""Ridge-spectral quantities and (ridge) leverage sampling distributions."""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NonPositiveLambda


@dataclass(frozen=True)
class RidgeSpectrum:
    lam: float
    sigma_lambda: np.ndarray
    d_lambda: float


def _check_lambda(lam):
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")


def ridge_spectrum(svd, lam):
    """Shrunk singular values ``sigma/sqrt(sigma^2 + lam)`` and their squared sum."""
    _check_lambda(lam)
    s2 = svd.sigma ** 2
    return RidgeSpectrum(float(lam), svd.sigma / np.sqrt(s2 + lam), float(np.sum(s2 / (s2 + lam))))


def effective_dof(sigma, lam):
    _check_lambda(lam)
    s2 = np.asarray(sigma, dtype=float) ** 2
    return float(np.sum(s2 / (s2 + lam)))


def lambda_for_dof(sigma, target):
    """The lambda at which the effective degrees of freedom equal ``target``."""
    sigma = np.asarray(sigma, dtype=float)
    if not 0 < target < sigma.size:
        raise ValueError("target must lie strictly between 0 and the rank")
    f = lambda log_lam: effective_dof(sigma, np.exp(log_lam)) - target
    lo = np.log(sigma[-1] ** 2) - 40
    hi = np.log(sigma[0] ** 2) + 40
    return float(np.exp(brentq(f, lo, hi, xtol=1e-14)))


def _normalize(weights):
    total = weights.sum()
    return weights / total


def leverage_probs(svd):
    """Column leverage scores of ``A`` divided by the rank."""
    return _normalize(np.einsum("ij,ij->i", svd.v, svd.v))


def ridge_leverage_probs(svd, lam):
    """Column ridge leverage scores divided by the effective degrees of freedom."""
    spec = ridge_spectrum(svd, lam)
    z = svd.v * spec.sigma_lambda
    return _normalize(np.einsum("ij,ij->i", z, z))


def uniform_probs(d):
    return np.full(d, 1.0 / d)
