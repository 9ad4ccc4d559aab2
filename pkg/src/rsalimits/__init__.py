"""Greedy exploration (random sequential adsorption) on homogeneous random graphs.

Simulation of the one-dimensional exploration chain together with its
fluid limit, diffusion approximation and hitting-time statistics.
"""

from .bounds import ErrorBudget, error_budget, lp_sup_bound, omega, poisson_n_factor
from .chain import (Batch, Trajectory, martingale_diagnostics, scaled_path, simulate,
                    simulate_batch)
from .ctime import (CtimeModel, simulate_ctime, simulate_ctime_batch, solve_ctime_fluid,
                    solve_ctime_variance)
from .diffusion import (CltPrediction, DiffusionSolution, clt_prediction, simulate_w_paths,
                        solve_variance_ode)
from .fluid import FluidSolution, er_closed_form, hitting_time_fluid, solve_fluid
from .graph_oracle import ExplorationRun, explore_batch, explore_er_graph
from .kernel import (ErKernel, Kernel, Limits, TabularKernel, er_kernel, poisson_limit_pmf,
                     complete_graph_kernel, deterministic_kernel, sample_xi, tabular_kernel)
from .stats import (McSummary, ks_statistic, run_clt_experiment, run_lln_experiment,
                    two_sample_ks)

__version__ = "0.1.0"
