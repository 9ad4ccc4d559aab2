"""
Gaussian fluctuations of the jamming fraction
=============================================

The fraction of active items ``T*_N / N`` concentrates at ``T*`` and its
``sqrt(N)`` fluctuations are Gaussian with a variance given by an ODE.
"""

import numpy as np

from rsalimits import clt_prediction, er_kernel, run_clt_experiment

for c in (1.0, 2.0):
    k = er_kernel(10_000, c)
    pred = clt_prediction(k)
    s = run_clt_experiment(k, runs=2000, seed=11, prediction=pred)
    print(f"c={c}: T*={pred.T_star:.6f} predicted var={pred.sigma_sq:.6f} "
          f"sample var={s.clt_var:.6f} KS={s.ks_stat:.4f}")

# %%
# Text histogram of the standardized samples for the last kernel.
w = s.clt_samples / np.sqrt(s.sigma_sq)
counts, edges = np.histogram(w, bins=np.linspace(-3, 3, 13))
for n, lo in zip(counts, edges):
    print(f"{lo:+.1f} {'#' * (n // 10)}")
