"""How often the mean estimator lands within delta.

Run: python demos/05_hoeffding.py
"""
import numpy as np

from bklab.attack import EstimatorParams, estimate_mean_batch

rng = np.random.default_rng(5)
params = EstimatorParams(0.05, 64)
print("m =", params.m, " Hoeffding failure bound =", params.failure_bound)

for p in (0.0, 0.1, 0.3, 0.5, 0.9, 1.0):
    est = np.array([estimate_mean_batch(lambda k, r: r.random(k) < p, params, rng) for _ in range(500)])
    print(f"p={p:.1f}  mean={est.mean():.4f}  max err={np.abs(est - p).max():.4f}  "
          f"within delta={np.mean(np.abs(est - p) <= params.delta):.3f}")
