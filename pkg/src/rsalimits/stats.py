"""Monte Carlo summaries for the law of large numbers and the hitting-time CLT."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .chain import simulate_batch
from .errors import EmptySampleError, InvalidParameterError
from .fluid import solve_fluid

# asymptotic one-sample KS critical constant at the 1% level
KS_CRIT_1PCT = 1.63


def ks_statistic(samples, cdf):
    """One-sample Kolmogorov-Smirnov distance ``sup_x |F_n(x) - F(x)|``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise EmptySampleError("no samples")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - F)
    d_minus = np.max(F - (i - 1) / n)
    return float(max(d_plus, d_minus))


def normal_cdf(sigma_sq):
    sd = math.sqrt(sigma_sq)
    return lambda x: sps.norm.cdf(x, scale=sd)


@dataclass
class McSummary:
    runs: int
    N: int
    kernel: dict
    seed: int
    T_star: float
    mean_hit: float
    var_hit: float
    rms_hit_error: float
    sup_dev_mean: float | None = None
    sigma_sq: float | None = None
    clt_samples: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    clt_mean: float | None = None
    clt_var: float | None = None
    ks_stat: float | None = None

    def verdict(self, experiment, passed):
        return {
            "experiment": experiment,
            "N": self.N,
            "c": self.kernel.get("c"),
            "runs": self.runs,
            "mean_hit": self.mean_hit,
            "var_hit": self.var_hit,
            "T_star": self.T_star,
            "sigma_sq": self.sigma_sq,
            "ks_stat": self.ks_stat,
            "pass": bool(passed),
        }


def _hit_stats(h, T_star):
    return float(h.mean()), float(h.var(ddof=1)), float(np.sqrt(np.mean((h - T_star) ** 2)))


def run_lln_experiment(kernel, runs, seed, fluid=None, threads=1):
    """Sup-path deviations and hitting fractions over ``runs`` chain runs."""
    if runs < 100:
        raise InvalidParameterError("the LLN experiment needs at least 100 runs")
    if fluid is None:
        fluid = solve_fluid(kernel)
    b = simulate_batch(kernel, runs, seed, fluid=fluid, threads=threads)
    mean, var, rms = _hit_stats(b.hitting_fractions, fluid.T_star)
    return McSummary(runs=runs, N=kernel.N, kernel=kernel.describe(), seed=seed,
                     T_star=float(fluid.T_star), mean_hit=mean, var_hit=var,
                     rms_hit_error=rms, sup_dev_mean=float(b.sup_dev.mean()))


def run_clt_experiment(kernel, runs, seed, prediction, threads=1):
    """Standardized hitting times ``sqrt(N) (T*_N / N - T*)`` against ``Normal(0, sigma_sq)``."""
    if runs < 1000:
        raise InvalidParameterError("the CLT experiment needs at least 1000 runs")
    T_star, sigma_sq = prediction
    if not sigma_sq > 0:
        raise InvalidParameterError("sigma_sq must be positive (deterministic kernels have no CLT)")
    b = simulate_batch(kernel, runs, seed, threads=threads)
    h = b.hitting_fractions
    w = math.sqrt(kernel.N) * (h - T_star)
    mean, var, rms = _hit_stats(h, T_star)
    return McSummary(runs=runs, N=kernel.N, kernel=kernel.describe(), seed=seed,
                     T_star=float(T_star), mean_hit=mean, var_hit=var, rms_hit_error=rms,
                     sigma_sq=float(sigma_sq), clt_samples=w,
                     clt_mean=float(w.mean()), clt_var=float(w.var(ddof=1)),
                     ks_stat=ks_statistic(w, normal_cdf(sigma_sq)))


def clt_checks(summary):
    """Moment and KS checks of a CLT summary at the runs-dependent widths."""
    n = summary.runs
    s2 = summary.sigma_sq
    return {
        "variance": abs(summary.clt_var / s2 - 1.0) <= 0.15,
        "mean": abs(summary.clt_mean) <= 3.0 * math.sqrt(s2 / n),
        "ks": summary.ks_stat < KS_CRIT_1PCT / math.sqrt(n),
    }


def two_sample_ks(a, b):
    """Two-sample KS statistic and p-value."""
    r = sps.ks_2samp(a, b)
    return float(r.statistic), float(r.pvalue)


def decade_factors(values):
    v = np.asarray(values, dtype=float)
    return v[:-1] / v[1:]
