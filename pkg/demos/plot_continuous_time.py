"""
Continuous-time exploration
===========================

Items wake up at exponential times. The scaled path now follows
``z' = lam (1 - z)(1 + gamma(z))`` and only approaches 1 asymptotically.
"""

import numpy as np

from rsalimits import CtimeModel, er_kernel, simulate_ctime, solve_ctime_fluid, solve_ctime_variance

model = CtimeModel(er_kernel(10_000, 1.0), lam=1.0)
sol = solve_ctime_fluid(model)
var = solve_ctime_variance(model, sol)
traj = simulate_ctime(model, seed=5)

print(f"z reaches 1 - 1e-6 at t = {sol.T_star:.4f}")
for t in (0.5, 1.0, 2.0, 3.0):
    print(f"t={t}: Z_t/N={traj(t):.4f} z(t)={float(sol(t)):.4f} "
          f"predicted sd={np.sqrt(var.m_at(t) / model.N):.4f}")
print(f"final active fraction {traj.jump_count / model.N:.4f}")
