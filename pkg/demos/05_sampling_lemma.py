"""
Approximate matrix multiplication by row sampling
=================================================

Sampling rows of Z with probability proportional to their squared norms
approximates Z^T Z in spectral norm. The sample size below depends only on
||Z||_F^2, epsilon and delta.
"""
import numpy as np

from rfda_sketch import lemma_sample_size, matmul_concentration

print("s for ||Z||_F^2 = 1, eps = 0.5, delta = 0.1:", lemma_sample_size(1.0, 0.5, 0.1))

rng = np.random.default_rng(0)
for rank in (5, 10, 20):
    q1, _ = np.linalg.qr(rng.standard_normal((1000, rank)))
    q2, _ = np.linalg.qr(rng.standard_normal((rank, rank)))
    z = (q1 * np.linspace(1.0, 0.1, rank)) @ q2.T
    res, errors = matmul_concentration(z, 0.5, 0.1, 200, seed=rank, workers=4, return_errors=True)
    print(f"rank {rank:>2}: s = {res.s_used:>4}, failure rate {res.failure_rate:.3f}, "
          f"95th percentile error {np.quantile(errors, 0.95):.3f}")
