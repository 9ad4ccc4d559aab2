"""
Fluid limit of the greedy exploration
=====================================

Simulate the exploration chain on an Erdos-Renyi kernel and compare the
scaled path with the solution of ``z' = 1 + gamma(z)``.
"""

import numpy as np

from rsalimits import er_kernel, scaled_path, simulate, solve_fluid

c = 1.0
sol = solve_fluid(er_kernel(10_000, c))
print(f"fluid hitting time T* = {sol.T_star:.6f}  (ln 2 = {np.log(2):.6f})")

# %%
# The chain at three sizes. The sup distance to the (stopped) fluid path
# shrinks roughly like 1 / sqrt(N).
for N in (100, 1_000, 10_000):
    traj = simulate(er_kernel(N, c), seed=2024)
    sp = scaled_path(traj)
    print(f"N={N:>6}  T*_N/N = {traj.hitting_step / N:.4f}  "
          f"sup |Z^N - z| = {sp.sup_deviation(sol):.4f}")

# %%
# A few points of the path next to the fluid solution.
sp = scaled_path(simulate(er_kernel(10_000, c), seed=7))
for t in np.linspace(0, 0.8, 9):
    print(f"t={t:.1f}  Z^N_t={sp(t):.4f}  z(t)={float(sol.stopped(t)):.4f}")
