"""Gaussian fluctuations around the fluid limit.

The limit ``W`` of ``sqrt(N) (Z^N_t - z(t))`` solves
``dW = gamma'(z(t)) W dt + sqrt(beta'(t)) dB`` with ``beta' = psi(z(t))``.
Its variance ``m_t = E[W_t^2]`` obeys ``m' = 2 gamma'(z) m + psi(z)``,
which is what Ito's formula gives for that SDE.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._ode import hermite, rk4
from ._rng import WPATHS, run_rng
from .errors import (DegenerateNormalizationError, InvalidParameterError,
                     NegativeDiffusionError)
from .fluid import solve_fluid

_NORMALIZATION_EPS = 1e-9
_PATH_BLOCK = 4096


@dataclass(frozen=True)
class DiffusionSolution:
    t: np.ndarray
    beta: np.ndarray
    m: np.ndarray
    dbeta: np.ndarray
    dm: np.ndarray
    sigma_sq: float | None
    fluid: object

    def __post_init__(self):
        y = np.column_stack([self.beta, self.m])
        dy = np.column_stack([self.dbeta, self.dm])
        object.__setattr__(self, "_interp", hermite(self.t, y, dy))

    def beta_at(self, t):
        return self._eval(t, 0)

    def m_at(self, t):
        return self._eval(t, 1)

    def _eval(self, t, col):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t[-1] + 1e-12):
            raise InvalidParameterError(f"t outside [0, {self.t[-1]}]")
        out = self._interp(np.minimum(t, self.t[-1]))[..., col]
        return float(out) if out.ndim == 0 else out


def integrate_variance(fluid, rate, drift_coef, beta_rate):
    """RK4 for ``(z, beta, m)`` on the fluid grid.

    ``rate(z)`` is the fluid drift, ``drift_coef(z)`` the linear SDE drift
    coefficient and ``beta_rate(z)`` the instantaneous variance ``beta'``.
    """

    def f(y):
        z, _, m = y
        return np.array([rate(z), beta_rate(z), 2.0 * drift_coef(z) * m + beta_rate(z)])

    t_max = float(fluid.t[-1])
    t, y, dy = rk4(f, [0.0, 0.0, 0.0], fluid.dt, t_max)
    return t, y, dy


def solve_variance_ode(fluid, kernel):
    """``beta``, ``m`` and the hitting-time variance ``m(T*) / (1 - gamma(1))^2``."""
    if fluid.T_star is None:
        raise InvalidParameterError("fluid solution has no hitting time")
    t, y, dy = integrate_variance(
        fluid,
        lambda z: 1.0 + float(kernel.gamma(z)),
        lambda z: float(kernel.gamma_prime(z)),
        lambda z: float(kernel.psi(z)),
    )
    norm = 1.0 - float(kernel.gamma(1.0))
    if abs(norm) < _NORMALIZATION_EPS:
        raise DegenerateNormalizationError("gamma(1) = 1: hitting-time CLT normalization vanishes")
    sol = DiffusionSolution(t, y[:, 1], y[:, 2], dy[:, 1], dy[:, 2], None, fluid)
    sigma_sq = sol.m_at(fluid.T_star) / norm ** 2
    return DiffusionSolution(t, y[:, 1], y[:, 2], dy[:, 1], dy[:, 2], sigma_sq, fluid)


@dataclass
class WPathStats:
    t: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    n_paths: int
    final: np.ndarray


def euler_maruyama(t, drift_coef, diff_rate, n_paths, seed):
    """Euler-Maruyama for ``dW = a(t) W dt + sqrt(b(t)) dB``, ``W(0) = 0``.

    ``drift_coef`` and ``diff_rate`` are arrays over the grid ``t``; the
    step from ``t[i]`` uses the left-point values. Paths are drawn in
    fixed blocks, each from its own stream, so results do not depend on
    how the work is split.
    """
    if n_paths < 1:
        raise InvalidParameterError("n_paths must be positive")
    h = np.diff(t)
    sq = np.sqrt(diff_rate[:-1] * h)
    means = np.zeros(len(t))
    sumsq = np.zeros(len(t))
    finals = []
    for b, lo in enumerate(range(0, n_paths, _PATH_BLOCK)):
        size = min(_PATH_BLOCK, n_paths - lo)
        rng = run_rng(seed, b, WPATHS)
        W = np.zeros(size)
        for i in range(len(h)):
            dB = rng.standard_normal(size)
            W = W + drift_coef[i] * W * h[i] + sq[i] * dB
            means[i + 1] += W.sum()
            sumsq[i + 1] += (W * W).sum()
        finals.append(W)
    mean = means / n_paths
    var = sumsq / n_paths - mean ** 2
    var *= n_paths / max(n_paths - 1, 1)
    return WPathStats(np.asarray(t), mean, var, n_paths, np.concatenate(finals))


def _clamped_rate(rate, t):
    if np.any(rate < -1e-9):
        i = int(np.argmin(rate))
        raise NegativeDiffusionError(f"beta' = {rate[i]:.3g} < 0 at t = {t[i]:.6g}")
    if np.any(rate < 0):
        warnings.warn("clamping tiny negative beta' values to 0", RuntimeWarning, stacklevel=3)
    return np.maximum(rate, 0.0)


def simulate_w_paths(fluid, kernel, dt=1e-3, n_paths=10_000, seed=0):
    """Sample paths of ``W`` on ``[0, T*]`` and return per-time mean and variance."""
    if dt > 1e-3:
        raise InvalidParameterError("dt must be at most 1e-3")
    T = fluid.T_star
    n = int(math.floor(T / dt + 1e-12))
    t = dt * np.arange(n + 1)
    if T - t[-1] > 1e-12:
        t = np.append(t, T)
    z = np.asarray(fluid(t))
    a = np.asarray(kernel.gamma_prime(z), dtype=float) * np.ones_like(z)
    b = _clamped_rate(np.asarray(kernel.psi(z), dtype=float), t)
    return euler_maruyama(t, a, b, n_paths, seed)


class CltPrediction(NamedTuple):
    T_star: float
    sigma_sq: float


def clt_prediction(kernel, fluid=None, diffusion=None):
    """Predicted limit law ``Normal(0, sigma_sq)`` of ``sqrt(N) (T*_N / N - T*)``."""
    if fluid is None:
        fluid = diffusion.fluid if diffusion is not None else solve_fluid(kernel)
    if diffusion is None:
        diffusion = solve_variance_ode(fluid, kernel)
    return CltPrediction(float(fluid.T_star), float(diffusion.sigma_sq))


def er_m_closed_form(t, c):
    """Closed-form ``m_t`` for the ER kernel."""
    t = np.asarray(t, dtype=float)
    e = np.exp(c * t)
    return np.exp(-2.0 * c * t) * (1.0 - e) * (e - 2.0 * c - 1.0) / (2.0 * c)


def er_sigma_sq(c):
    return c / (2.0 * (c + 1.0) ** 2)
