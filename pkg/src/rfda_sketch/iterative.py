"""Iterative sketched RFDA solvers.

``iterate_rfda`` runs the refinement loop

    L_j = L_{j-1} - lam * Y_{j-1} - A @ Gt_{j-1}
    Y_j = (A S S^T A^T + lam I)^{-1} L_j
    Gt_j = A^T Y_j

from ``L_0 = Omega`` and returns the sum of the ``Gt_j``. The sketched inverse
is applied through the SVD of ``A S``, factored once per distinct operator.

``iterate_pinv_fda`` is the rank-k pseudo-inverse counterpart, with
``Ft_j = A_k^T (A_k S_j)^{+T} (A_k S_j)^+ L_j`` and ``L_{j+1} = L_j - A_k Ft_j``.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import NonPositiveLambda, RankTooLarge, SketchRankDeficient
from .linalg import DEFAULT_RANK_TOL, thin_svd
from .sketch import (SketchOperator, apply_sketch, build_count_sketch, build_sampling_operator,
                     build_srht, identity_operator, struct_condition_value)
from .solvers import RfdaEstimate, exact_g
from .spectrum import leverage_probs, ridge_leverage_probs, uniform_probs

SAMPLING_METHODS = ("uniform", "leverage", "ridge_leverage")
METHODS = SAMPLING_METHODS + ("count_sketch", "srht", "identity")


@dataclass(frozen=True)
class SketchPolicy:
    """How the sketching operator(s) of a solve are drawn.

    With ``resample_each_iteration`` the operator of iteration ``j`` is drawn
    from the stream ``(seed, j)``; otherwise ``(seed, 0)`` is used throughout.
    """

    method: str
    s: int
    resample_each_iteration: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown sketch method {self.method!r}; expected one of {METHODS}")
        if self.s < 1:
            raise ValueError("sketch size must be at least 1")

    @property
    def needs_svd(self):
        return self.method in ("leverage", "ridge_leverage")


@dataclass
class IterationRecord:
    j: int
    residual_norm: float
    update_norm: float
    rel_err: Optional[float] = None
    struct_value: Optional[float] = None
    plain_struct_value: Optional[float] = None
    contraction: Optional[float] = None

    @property
    def epsilon(self):
        """Measured epsilon (twice the structural value), or None."""
        return None if self.struct_value is None else 2.0 * self.struct_value


@dataclass
class IterationTrace:
    records: List[IterationRecord] = field(default_factory=list)
    iterates: List[np.ndarray] = field(default_factory=list)
    resampled: bool = False

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def max_epsilon(self):
        eps = [r.epsilon for r in self.records if r.epsilon is not None]
        return max(eps) if eps else None

    @property
    def bounds_applicable(self):
        """False when some measured epsilon is >= 1 and the error bounds do not apply."""
        eps = self.max_epsilon
        return eps is not None and eps < 1


def _sampling_probs(method, d, svd, lam):
    if method == "uniform":
        return uniform_probs(d)
    if method == "leverage":
        return leverage_probs(svd)
    if lam is None:
        raise ValueError("ridge leverage sampling needs a regularization parameter")
    return ridge_leverage_probs(svd, lam)


def _operator_source(policy, d, svd, lam):
    """Callable ``j -> (operator, is_new)``."""
    if isinstance(policy, SketchOperator):
        return lambda j: (policy, j == 1)
    probs = _sampling_probs(policy.method, d, svd, lam) if policy.method in SAMPLING_METHODS else None

    def build(j):
        if j > 1 and not policy.resample_each_iteration:
            return None, False
        key = (policy.seed, j if policy.resample_each_iteration else 0)
        if policy.method == "identity":
            op = identity_operator(d)
        elif probs is not None:
            op = build_sampling_operator(probs, policy.s, key)
        elif policy.method == "count_sketch":
            op = build_count_sketch(d, policy.s, key)
        else:
            op = build_srht(d, policy.s, key)
        return op, True

    return build


def _needs_svd(policy):
    return isinstance(policy, SketchPolicy) and policy.needs_svd


def _rel(x, ref_norm):
    return float(np.linalg.norm(x) / ref_norm)


def _sketched_solve(rhs, p, inv, lam):
    """``(A S S^T A^T + lam I)^{-1} rhs`` from the SVD ``A S = P diag(delta) Q^T``.

    ``inv = 1 / (delta^2 + lam)``. The part of ``rhs`` outside the span of P is
    scaled by ``1/lam``; when P is square that part is empty and is skipped, which
    avoids cancelling two O(1/lam) terms.
    """
    core = p @ (inv[:, None] * (p.T @ rhs))
    if p.shape[1] == p.shape[0]:
        return core
    return core + (rhs - p @ (p.T @ rhs)) / lam


def _has_zero_column_sums(a):
    scale = np.abs(a).sum(axis=0).max() if a.size else 0.0
    return scale > 0 and np.abs(a.sum(axis=0)).max() <= 1e-12 * scale


def iterate_rfda(ds, lam, policy, t, reference=None, *, svd=None, diagnostics=False,
                 check_identity=False, keep_iterates=False, identity_rtol=1e-8):
    """Iterative sketched estimate of the RFDA matrix G.

    ``policy`` is a SketchPolicy or a fixed SketchOperator. ``reference`` is the
    exact G (array or RfdaEstimate) used for relative errors in the trace.
    With ``diagnostics`` the trace also records the ridge and plain structural
    values of each operator and ``||S_l S^{-1} U^T L_j||_2``. With
    ``check_identity`` the identity ``G = G_j + sum_{i<j} Gt_i`` is asserted at
    every iteration to ``identity_rtol``.
    """
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    if t < 1:
        raise ValueError("need at least one iteration")
    a, omega = ds.a, ds.omega
    # For centered data the all-ones vector spans part of null(A^T): its share of L
    # maps to itself / lam under the sketched inverse and to zero under A^T. Handling
    # it in closed form keeps the 1/lam round-off out of Gt.
    deflate = _has_zero_column_sums(a)
    n, d = a.shape
    if svd is None and (_needs_svd(policy) or diagnostics or check_identity):
        svd = thin_svd(a)
    if isinstance(reference, RfdaEstimate):
        reference = reference.g
    if reference is None and check_identity:
        reference = exact_g(ds, lam, svd).g
    ref_norm = None if reference is None else np.linalg.norm(reference)
    if ref_norm == 0:
        ref_norm = None
    if svd is not None:
        weight = 1.0 / np.sqrt(svd.sigma ** 2 + lam)        # diag(S_l S^-1)
        shrink = svd.sigma / (svd.sigma ** 2 + lam)          # diag(S_l^2 S^-1)

    next_operator = _operator_source(policy, d, svd, lam)
    trace = IterationTrace(resampled=isinstance(policy, SketchPolicy) and policy.resample_each_iteration)
    residual = omega.copy()
    y = np.zeros((n, omega.shape[1]))
    g_step = np.zeros((d, omega.shape[1]))
    g_hat = np.zeros_like(g_step)
    struct_ridge = struct_plain = None

    for j in range(1, t + 1):
        residual = residual - lam * y - a @ g_step
        op, is_new = next_operator(j)
        if is_new:
            p, delta, _ = np.linalg.svd(apply_sketch(a, op), full_matrices=False)
            inv = 1.0 / (delta ** 2 + lam)
            if diagnostics:
                struct_ridge = struct_condition_value(svd, op, "ridge", lam=lam)
                struct_plain = struct_condition_value(svd, op, "plain")
        if check_identity:
            g_j = (svd.v * shrink) @ (svd.u.T @ residual)
            gap = np.linalg.norm(g_j + g_hat - reference) / max(np.linalg.norm(reference), np.finfo(float).tiny)
            if gap > identity_rtol:
                raise AssertionError(f"induction identity violated at iteration {j}: relative gap {gap:.3e}")
        if deflate:
            null_part = np.broadcast_to(residual.mean(axis=0), residual.shape)
            y_range = _sketched_solve(residual - null_part, p, inv, lam)
            g_step = a.T @ y_range
            y = y_range + null_part / lam
        else:
            y = _sketched_solve(residual, p, inv, lam)
            g_step = a.T @ y
        g_hat = g_hat + g_step

        rec = IterationRecord(j, float(np.linalg.norm(residual)), float(np.linalg.norm(g_step)))
        if ref_norm is not None:
            rec.rel_err = _rel(g_hat - reference, ref_norm)
        if diagnostics:
            rec.struct_value = struct_ridge
            rec.plain_struct_value = struct_plain
            rec.contraction = float(np.linalg.norm(weight[:, None] * (svd.u.T @ residual), 2))
        trace.records.append(rec)
        if keep_iterates:
            trace.iterates.append(g_hat.copy())

    return RfdaEstimate(g_hat, lam=float(lam), iterations=t, trace=trace)


def iterate_pinv_fda(ds, k, policy, t, reference=None, *, svd=None, diagnostics=False,
                     keep_iterates=False, rank_tol=DEFAULT_RANK_TOL):
    """Iterative sketched estimate of the rank-k pseudo-inverse FDA matrix F.

    Raises SketchRankDeficient when ``A_k S_j`` has rank below ``k``.
    """
    if t < 1:
        raise ValueError("need at least one iteration")
    if svd is None:
        svd = thin_svd(ds.a)
    if not 1 <= k <= svd.rank:
        raise RankTooLarge(f"k={k} must lie in 1..{svd.rank}")
    top = svd.truncate(k)
    a_k = (top.u * top.sigma) @ top.v.T
    if isinstance(reference, RfdaEstimate):
        reference = reference.g
    ref_norm = None if reference is None else np.linalg.norm(reference)

    next_operator = _operator_source(policy, ds.d, top, None)
    trace = IterationTrace(resampled=isinstance(policy, SketchPolicy) and policy.resample_each_iteration)
    residual = ds.omega.copy()
    f_hat = np.zeros((ds.d, ds.c))
    struct = None

    for j in range(1, t + 1):
        op, is_new = next_operator(j)
        if is_new:
            p, delta, _ = np.linalg.svd(apply_sketch(a_k, op), full_matrices=False)
            rank = int(np.count_nonzero(delta > rank_tol * delta[0])) if delta[0] > 0 else 0
            if rank < k:
                raise SketchRankDeficient(f"A_k S has rank {rank} < k={k} at iteration {j}")
            p, delta = p[:, :k], delta[:k]
            if diagnostics:
                struct = struct_condition_value(top, op, "rank_k", k=k)
        f_step = a_k.T @ (p @ ((p.T @ residual) / delta[:, None] ** 2))
        f_hat = f_hat + f_step

        rec = IterationRecord(j, float(np.linalg.norm(residual)), float(np.linalg.norm(f_step)))
        if ref_norm:
            rec.rel_err = _rel(f_hat - reference, ref_norm)
        if diagnostics:
            rec.struct_value = struct
            rec.contraction = float(np.linalg.norm((top.u.T @ residual) / top.sigma[:, None], 2))
        trace.records.append(rec)
        if keep_iterates:
            trace.iterates.append(f_hat.copy())
        residual = residual - a_k @ f_step

    return RfdaEstimate(f_hat, k=int(k), iterations=t, trace=trace)
