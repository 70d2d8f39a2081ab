"""
Sketching operators and the structural condition
================================================

Every sketch family is applied to the data as A @ S. The structural value
||Sl V^T S S^T V Sl - Sl^2||_2 measures how well S preserves the geometry
the iterative solver depends on; twice that value is the measured epsilon.
"""
import numpy as np

from rfda_sketch import (apply_sketch, build_count_sketch, build_sampling_operator, build_srht,
                         center_and_membership, geometric_spectrum, ridge_leverage_probs,
                         ridge_spectrum, struct_condition_value, synthesize_dataset, thin_svd,
                         uniform_probs)

raw, labels = synthesize_dataset(100, 1000, 4, geometric_spectrum(20, 10.0, 0.8), 1.0, seed=0)
ds = center_and_membership(raw, labels)
svd = thin_svd(ds.a)
lam = 1.0
print(f"rank {svd.rank}, effective dof at lambda={lam}: {ridge_spectrum(svd, lam).d_lambda:.2f}")

builders = {
    "uniform": lambda s, k: build_sampling_operator(uniform_probs(ds.d), s, k),
    "ridge leverage": lambda s, k: build_sampling_operator(ridge_leverage_probs(svd, lam), s, k),
    "count sketch": lambda s, k: build_count_sketch(ds.d, s, k),
    "srht": lambda s, k: build_srht(ds.d, s, k),
}

print("median measured epsilon over 10 seeds")
print(f"{'s':>6}" + "".join(f"{name:>16}" for name in builders))
for s in (100, 250, 500, 1000):
    row = [np.median([2 * struct_condition_value(svd, build(s, k), "ridge", lam=lam) for k in range(10)])
           for build in builders.values()]
    print(f"{s:>6}" + "".join(f"{e:>16.3f}" for e in row))

# the fast Hadamard path and the dense operator agree
op = build_srht(ds.d, 64, 0)
print("SRHT fast vs dense:", np.abs(apply_sketch(ds.a, op) - ds.a @ op.to_dense()).max())
