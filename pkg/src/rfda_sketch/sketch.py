"""Sketching operators applied on the right of a matrix, ``A -> A @ S``.

Operators are stored implicitly (indices, signs, buckets); ``to_dense`` exists
for checking and small examples only.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateDistribution, ShapeMismatch, SketchTooLarge
from .linalg import as_matrix
from .spectrum import ridge_spectrum

SAMPLING = "sampling"
COUNT_SKETCH = "count_sketch"
SRHT = "srht"


def make_rng(seed):
    """Generator for an int seed or a tuple such as ``(seed, trial)``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        return np.random.default_rng(np.random.SeedSequence([int(x) for x in seed]))
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def next_pow2(d):
    return 1 << max(int(d) - 1, 0).bit_length()


def fwht(x):
    """Unnormalized Walsh-Hadamard transform along the last axis (Sylvester order)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < n:
        x = x.reshape(*lead, n // (2 * h), 2, h)
        x = np.stack((x[..., 0, :] + x[..., 1, :], x[..., 0, :] - x[..., 1, :]), axis=-2)
        h *= 2
    return x.reshape(*lead, n)


@dataclass(frozen=True, eq=False)
class SketchOperator:
    """Implicit ``d x s`` sketching matrix.

    sampling:     ``index[t]`` is the sampled row of column ``t``, ``value[t]`` its scale.
    count_sketch: ``index[i]`` is the bucket of row ``i``, ``value[i]`` its sign.
    srht:         ``index`` holds the ``s`` selected coordinates of the padded
                  dimension ``d_pad``, ``value`` the ``d`` row signs.
    """

    kind: str
    d: int
    s: int
    index: np.ndarray
    value: np.ndarray
    d_pad: int = 0

    def apply(self, a):
        return apply_sketch(a, self)

    def to_dense(self):
        out = np.zeros((self.d, self.s))
        if self.kind == SAMPLING:
            out[self.index, np.arange(self.s)] = self.value
        elif self.kind == COUNT_SKETCH:
            out[np.arange(self.d), self.index] = self.value
        else:
            h = fwht(np.eye(self.d_pad))[: self.d, self.index]
            out = self.value[:, None] * h / np.sqrt(self.s)
        return out


def identity_operator(d):
    """Sampling operator whose dense form is ``I_d``."""
    return SketchOperator(SAMPLING, d, d, np.arange(d), np.ones(d))


def build_sampling_operator(probs, s, seed):
    """Draw ``s`` rows i.i.d. from ``probs`` and rescale each by ``1/sqrt(s p_i)``."""
    probs = np.asarray(probs, dtype=float)
    if s < 1:
        raise ValueError("sketch size must be at least 1")
    if probs.ndim != 1 or np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise ValueError("probabilities must be a finite non-negative vector")
    total = probs.sum()
    if total <= 0:
        raise DegenerateDistribution("all sampling probabilities are zero")
    p = probs / total
    idx = make_rng(seed).choice(p.shape[0], size=int(s), p=p)
    return SketchOperator(SAMPLING, p.shape[0], int(s), idx, 1.0 / np.sqrt(s * p[idx]))


def build_count_sketch(d, s, seed):
    if s < 1:
        raise ValueError("sketch size must be at least 1")
    rng = make_rng(seed)
    buckets = rng.integers(0, s, size=d)
    signs = rng.choice(np.array([-1.0, 1.0]), size=d)
    return SketchOperator(COUNT_SKETCH, int(d), int(s), buckets, signs)


def build_srht(d, s, seed):
    d_pad = next_pow2(d)
    if s < 1:
        raise ValueError("sketch size must be at least 1")
    if s > d_pad:
        raise SketchTooLarge(f"s={s} exceeds the padded dimension {d_pad}")
    rng = make_rng(seed)
    signs = rng.choice(np.array([-1.0, 1.0]), size=d)
    chosen = rng.choice(d_pad, size=int(s), replace=False)
    return SketchOperator(SRHT, int(d), int(s), chosen, signs, d_pad)


def apply_sketch(a, op):
    """``a @ S`` without materializing ``S``."""
    a = as_matrix(a)
    if a.shape[1] != op.d:
        raise ShapeMismatch(f"matrix has {a.shape[1]} columns, operator expects {op.d}")
    if op.kind == SAMPLING:
        return a[:, op.index] * op.value
    if op.kind == COUNT_SKETCH:
        s_mat = sp.csr_matrix((op.value, (np.arange(op.d), op.index)), shape=(op.d, op.s))
        return np.asarray((s_mat.T @ a.T).T)
    padded = np.zeros((a.shape[0], op.d_pad))
    padded[:, : op.d] = a * op.value
    return fwht(padded)[:, op.index] / np.sqrt(op.s)


def _condition_factor(svd, mode, lam, k):
    if mode == "ridge":
        sl = ridge_spectrum(svd, lam).sigma_lambda
        return svd.v * sl, np.diag(sl ** 2)
    if mode == "plain":
        return svd.v, np.eye(svd.rank)
    if mode == "rank_k":
        if k is None or not 1 <= k <= svd.rank:
            raise ValueError(f"rank_k mode needs 1 <= k <= {svd.rank}")
        return svd.v[:, :k], np.eye(k)
    raise ValueError(f"unknown structural mode {mode!r}")


def struct_condition_value(svd, op, mode="ridge", lam=None, k=None):
    """Spectral-norm deviation of the sketched Gram of the relevant factor.

    ridge:  ``||S_l V^T S S^T V S_l - S_l^2||_2``
    plain:  ``||V^T S S^T V - I||_2``
    rank_k: ``||V_k^T S S^T V_k - I_k||_2``

    The condition holds at level eps when the value is at most eps/2.
    """
    if svd.v.shape[0] != op.d:
        raise ShapeMismatch(f"operator dimension {op.d} != {svd.v.shape[0]} features")
    z, target = _condition_factor(svd, mode, lam, k)
    zs = apply_sketch(z.T, op)
    diff = zs @ zs.T - target
    return float(np.max(np.abs(np.linalg.eigvalsh((diff + diff.T) / 2))))
