"""
Rank-k pseudo-inverse variant
=============================

Without regularization the target is F = V_k diag(1/sigma_k) U_k^T Omega.
The iteration is the same idea with the pseudo-inverse of A_k S.
"""
import numpy as np

from rfda_sketch import (SketchPolicy, center_and_membership, exact_pinv_f, geometric_spectrum,
                         iterate_pinv_fda, pinv_bound_check, synthesize_dataset, thin_svd)

raw, labels = synthesize_dataset(60, 400, 3, geometric_spectrum(5, 5.0, 0.8), 1.0, seed=7)
ds = center_and_membership(raw, labels)
svd = thin_svd(ds.a)
k = 5
ref = exact_pinv_f(ds, k, svd)

est = iterate_pinv_fda(ds, k, SketchPolicy("leverage", 40 * k, seed=0), 6, ref, svd=svd,
                       diagnostics=True, keep_iterates=True)
eps = est.trace.records[0].epsilon
print(f"measured epsilon {eps:.3f}")
w = ds.grand_mean + np.random.default_rng(1).standard_normal(ds.d)
for t, f_t in enumerate(est.trace.iterates, start=1):
    check = pinv_bound_check(w, ds, f_t, ref, eps, t, k, svd=svd)
    print(f"t={t}: rel err {est.trace.records[t - 1].rel_err:.1e}  distortion {check.lhs:.2e} <= {check.rhs:.2e}: {check.holds}")
