"""Named validation suites run by ``rsalimits validate``."""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import bounds, chain, ctime, diffusion, fluid, graph_oracle, kernel, stats


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name} ({self.seconds:.2f}s) {self.detail}"

    def to_dict(self):
        return {"name": self.name, "pass": self.passed, "seconds": self.seconds,
                "detail": self.detail}


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        chk = fn(*args, **kw)
        chk.seconds = time.perf_counter() - t0
        return chk
    wrapper.__name__ = fn.__name__
    return wrapper


@_timed
def check_fluid_oracle(cs=(0.5, 1.0, 2.0), dt=1e-3):
    worst_z = worst_T = 0.0
    for c in cs:
        k = kernel.er_kernel(10_000, c)
        sol = fluid.solve_fluid(k, dt=dt)
        exact = fluid.er_closed_form(c)
        worst_z = max(worst_z, float(np.max(np.abs(sol.z - exact(sol.t)))))
        worst_T = max(worst_T, abs(sol.T_star - math.log1p(c) / c))
    ok = worst_z < 1e-8 and worst_T < 1e-8
    return Check("fluid oracle", ok, {"sup_z_err": worst_z, "T_star_err": worst_T})


@_timed
def check_variance_oracle(cs=(0.5, 1.0, 2.0), dt=1e-3):
    worst_m = worst_s = 0.0
    for c in cs:
        k = kernel.er_kernel(10_000, c)
        sol = fluid.solve_fluid(k, dt=dt)
        d = diffusion.solve_variance_ode(sol, k)
        worst_m = max(worst_m, float(np.max(np.abs(d.m - diffusion.er_m_closed_form(d.t, c)))))
        worst_s = max(worst_s, abs(d.sigma_sq - diffusion.er_sigma_sq(c)))
    ok = worst_m < 1e-6 and worst_s < 1e-8
    return Check("variance oracle", ok, {"sup_m_err": worst_m, "sigma_sq_err": worst_s})


@_timed
def check_lln(c=1.0, Ns=(100, 1000, 10_000), runs=500, seed=11, threads=1):
    means, omegas = [], []
    for i, N in enumerate(Ns):
        k = kernel.er_kernel(N, c)
        s = stats.run_lln_experiment(k, runs, seed + i, threads=threads)
        means.append(s.sup_dev_mean)
        omegas.append(bounds.omega(k, 1.0))
    f = stats.decade_factors(means)
    ok = (all(np.diff(means) < 0) and all((2.5 <= f) & (f <= 4.5)) and means[-1] < 0.02
          and all(m <= w for m, w in zip(means, omegas)))
    return Check("LLN sup deviation", bool(ok),
                 {"sup_dev_mean": means, "factors": f.tolist(), "omega": omegas})


@_timed
def check_hitting_lln(c=1.0, N=10_000, runs=2000, seed=21, threads=1):
    k = kernel.er_kernel(N, c)
    b = chain.simulate_batch(k, runs, seed, threads=threads)
    m = float(b.hitting_fractions.mean())
    T = math.log1p(c) / c
    return Check("hitting-time LLN", abs(m - T) <= 0.005, {"mean_hit": m, "T_star": T})


@_timed
def check_clt(c=1.0, N=10_000, runs=2000, seed=31, threads=1):
    k = kernel.er_kernel(N, c)
    pred = diffusion.clt_prediction(k)
    s = stats.run_clt_experiment(k, runs, seed, pred, threads=threads)
    flags = stats.clt_checks(s)
    return Check(f"CLT c={c:g}", all(flags.values()),
                 {"var": s.clt_var, "sigma_sq": s.sigma_sq, "mean": s.clt_mean,
                  "ks": s.ks_stat, **{k_: bool(v) for k_, v in flags.items()}})


@_timed
def check_chain_graph(N=200, c=2.0, runs=5000, seed=41, threads=1):
    k = kernel.er_kernel(N, c)
    a = chain.simulate_batch(k, runs, seed, threads=threads).hitting_steps
    g = graph_oracle.explore_batch(N, c, runs, seed, threads=threads)
    D, p = stats.two_sample_ks(a, g)
    return Check("chain/graph equivalence", p >= 1e-3,
                 {"ks": D, "p_value": p, "chain_mean": float(a.mean() / N),
                  "graph_mean": float(g.mean() / N)})


@_timed
def check_martingale(c=1.0, N=1000, runs=10_000, seed=51, threads=1):
    k = kernel.er_kernel(N, c)
    steps = [N // 4, N // 2, 3 * N // 4]
    b = chain.simulate_batch(k, runs, seed, record_steps=steps, threads=threads)
    d = chain.martingale_diagnostics(b, steps)
    # z-test at 1e-3 with Bonferroni over the grid
    zcrit = norm.isf(1e-3 / (2 * len(steps)))
    ok = bool(np.all(np.abs(d.z_scores) < zcrit) and np.all((0.95 <= d.ratio) & (d.ratio <= 1.05)))
    return Check("martingale identity", ok,
                 {"mean_M": d.mean_M.tolist(), "z": d.z_scores.tolist(), "ratio": d.ratio.tolist()})


@_timed
def check_ctime(c=1.0, lam=1.0, N=10_000, runs=100, seed=61, threads=1):
    model = ctime.CtimeModel(kernel.er_kernel(N, c), lam)
    fl = ctime.solve_ctime_fluid(model, t_max=20.0)
    b = ctime.simulate_ctime_batch(model, runs, seed, fluid=fl, t_sup=3.0, threads=threads)
    good = int(np.sum(b.sup_dev < 0.05))
    m0 = ctime.CtimeModel(kernel.deterministic_kernel(100), 1.0)
    f0 = ctime.solve_ctime_fluid(m0)
    v0 = ctime.solve_ctime_variance(m0, f0)
    err = float(np.max(np.abs(v0.m - (np.exp(-v0.t) - np.exp(-2 * v0.t)))))
    ok = good >= 99 * runs / 100 and err < 1e-6
    return Check("continuous time", ok, {"runs_within_0.05": good, "runs": runs,
                                         "max_sup_dev": float(b.sup_dev.max()), "m_err": err})


def stein_chen_ratio(N=1000, c=1.0, kmax=30):
    """Largest ``|p_N(k, x) - p(k, x/N)| N / (c p(k, x/N))`` over the test grid."""
    k = kernel.er_kernel(N, c)
    ks = np.arange(kmax + 1)
    worst = 0.0
    arg = None
    for x in (0, N // 4, N // 2, 3 * N // 4):
        pN = k.pmf(ks, x)
        p = kernel.poisson_limit_pmf(ks, x / N, c)
        r = np.abs(pN - p) * N / (c * p)
        i = int(np.argmax(r))
        if r[i] > worst:
            worst, arg = float(r[i]), (int(ks[i]), x)
    return worst, arg


@_timed
def check_stein_chen(N=1000, c=1.0):
    kappa, arg = stein_chen_ratio(N, c)
    # this criterion reports; the flag records whether kappa <= 1 held
    return Check("Stein-Chen ratio (report)", True,
                 {"kappa": kappa, "argmax_k_x": list(arg), "kappa_le_1": kappa <= 1.0})


PRESETS = {
    "er-c1": lambda th: [
        check_fluid_oracle(), check_variance_oracle(), check_lln(threads=th),
        check_hitting_lln(threads=th), check_clt(1.0, threads=th), check_clt(2.0, threads=th),
        check_chain_graph(threads=th), check_martingale(threads=th), check_ctime(threads=th),
        check_stein_chen(),
    ],
    "quick": lambda th: [check_fluid_oracle(), check_variance_oracle(), check_stein_chen()],
}


def run_preset(name, threads=1):
    if name not in PRESETS:
        raise KeyError(name)
    return PRESETS[name](threads)
