"""Continuous-time exploration.

Each unexplored item carries an independent exponential clock of rate
``lam``. When one rings the item is activated and ``1 + xi_Z`` items become
explored, so from state ``Z`` the next jump comes at rate ``lam (N - Z)``.
The scaled process follows ``z' = lam (1 - z) (1 + gamma(z))`` in the limit.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._ode import rk4
from ._rng import CTIME, chunks, fan_out, run_rng
from .diffusion import DiffusionSolution, euler_maruyama, integrate_variance
from .errors import InvalidParameterError
from .fluid import FluidSolution, hitting_time_fluid

SOFT_HIT_GAP = 1e-6


@dataclass(frozen=True)
class CtimeModel:
    kernel: object
    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidParameterError(f"lambda must be positive, got {self.lam!r}")

    @property
    def N(self):
        return self.kernel.N

    def rate(self, z):
        k = self.kernel
        return self.lam * (1.0 - z) * (1.0 + k.gamma(z))

    def g(self, z):
        """``(1 - z)(1 + gamma(z))``, the drift per unit of ``lam``."""
        return (1.0 - np.asarray(z, dtype=float)) * (1.0 + self.kernel.gamma(z))

    def g_N(self, x):
        x = np.asarray(x)
        return (1.0 - x / self.N) * (1.0 + self.kernel.gamma_N(x))

    @property
    def alpha_N(self):
        x = np.arange(self.N)
        return float(np.max(np.abs(self.g_N(x) - self.g(x / self.N))))

    @property
    def C_N(self):
        k = self.kernel
        return k.psi_bar_N / k.N + (1.0 + k.gamma_bar_N) ** 2 / k.N

    def drift_coef(self, z):
        k = self.kernel
        return self.lam * (-(1.0 + k.gamma(z)) + k.gamma_prime(z) * (1.0 - z))

    def beta_rate(self, z):
        k = self.kernel
        return self.lam * (1.0 - z) * (k.psi(z) + (1.0 + k.gamma(z)) ** 2)


@dataclass
class CtimeTrajectory:
    N: int
    times: np.ndarray
    z_values: np.ndarray
    m_values: np.ndarray
    seed: int
    run_index: int

    @property
    def jump_count(self):
        return len(self.z_values) - 1

    def __call__(self, t):
        """Scaled path ``Z_t / N`` (right-continuous)."""
        i = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right") - 1
        out = self.z_values[np.maximum(i, 0)] / self.N
        return float(out) if np.ndim(out) == 0 else out


@dataclass
class CtimeBatch:
    N: int
    seed: int
    jump_counts: np.ndarray
    absorption_times: np.ndarray
    sup_dev: np.ndarray | None
    paths: list | None


def _run_chunk(model, seed, run_indices, fluid, t_sup, store_paths):
    k = model.kernel
    N = k.N
    lam = model.lam
    R = len(run_indices)
    # per run: the first N uniforms drive xi, the next N the clocks
    U = np.stack([1.0 - run_rng(seed, r, CTIME).random(2 * N) for r in run_indices])
    Z = np.zeros(R, dtype=np.int64)
    tau = np.zeros(R)
    comp = np.zeros(R)
    alive = np.ones(R, dtype=bool)
    jumps = np.zeros(R, dtype=np.int64)
    dev = np.zeros(R) if fluid is not None else None
    if store_paths:
        tp, zp, mp = [[0.0] for _ in range(R)], [[0] for _ in range(R)], [[0.0] for _ in range(R)]

    n = 0
    while alive.any():
        u_xi = U[:, n]
        u_clock = U[:, N + n]
        x = np.minimum(Z, N - 1)
        rate = lam * (N - Z)
        wait = np.where(alive, -np.log(u_clock) / np.maximum(rate, 1), 0.0)
        t_new = tau + wait
        if dev is not None:
            lo = np.minimum(tau, t_sup)
            hi = np.minimum(t_new, t_sup)
            a = Z / N
            d = np.maximum(np.abs(a - fluid(lo)), np.abs(a - fluid(hi)))
            dev = np.where(alive & (tau < t_sup), np.maximum(dev, d), dev)
        comp = comp + np.where(alive, rate * (1.0 + k.gamma_N(x)) * wait, 0.0)
        xi = np.where(alive, k.quantile(u_xi, x), 0)
        Z = Z + np.where(alive, 1 + xi, 0)
        tau = t_new
        jumps += alive
        n += 1
        if store_paths:
            for i in np.flatnonzero(alive):
                tp[i].append(tau[i])
                zp[i].append(int(Z[i]))
                mp[i].append(Z[i] - comp[i])
        newly = alive & (Z >= N)
        if newly.any():
            alive &= ~newly
            if dev is not None:
                d = np.abs(1.0 - fluid(np.minimum(tau, t_sup)))
                dev = np.where(newly & (tau < t_sup), np.maximum(dev, d), dev)
    paths = None
    if store_paths:
        paths = [CtimeTrajectory(N, np.array(tp[i]), np.array(zp[i]), np.array(mp[i]),
                                 seed, int(r)) for i, r in enumerate(run_indices)]
    return jumps, tau, dev, paths


def simulate_ctime_batch(model, runs, seed, fluid=None, t_sup=3.0, store_paths=False,
                         threads=1, run_start=0, chunk_size=None):
    """Simulate ``runs`` continuous-time explorations.

    With ``fluid`` given, records ``sup_{t <= t_sup} |Z_t / N - z(t)|`` exactly.
    """
    if fluid is not None and fluid.t[-1] < t_sup:
        raise InvalidParameterError("fluid solution must cover [0, t_sup]")

    def work(idx):
        return _run_chunk(model, seed, idx, fluid, t_sup, store_paths)

    if chunk_size is None:
        chunk_size = max(1, min(2048, 4_000_000 // (2 * model.N)))
    parts = fan_out(work, chunks(run_start, runs, chunk_size), threads)
    return CtimeBatch(
        N=model.N,
        seed=seed,
        jump_counts=np.concatenate([p[0] for p in parts]),
        absorption_times=np.concatenate([p[1] for p in parts]),
        sup_dev=np.concatenate([p[2] for p in parts]) if fluid is not None else None,
        paths=sum((p[3] for p in parts), []) if store_paths else None,
    )


def simulate_ctime(model, seed, run_index=0):
    """One trajectory: event times and ``Z`` values until absorption at ``N``.

    ``m_values`` holds ``Z_t`` minus its compensator
    ``int_0^t lam (N - Z_s)(1 + gamma_N(Z_s)) ds`` at each event time.
    """
    b = simulate_ctime_batch(model, 1, seed, run_start=run_index, store_paths=True)
    return b.paths[0]


def solve_ctime_fluid(model, dt=1e-3, t_max=20.0):
    """RK4 for ``z' = lam (1 - z)(1 + gamma(z))``.

    ``z = 1`` is only approached asymptotically; ``T_star`` holds the time
    at which ``z`` reaches ``1 - 1e-6`` (``hit_label = "soft_hit"``), or
    ``None`` if that happens after ``t_max``.
    """
    if dt <= 0 or dt > 1e-2:
        raise InvalidParameterError(f"dt must lie in (0, 1e-2], got {dt!r}")

    def f(y):
        return np.asarray(model.rate(y), dtype=float)

    t, y, dy = rk4(f, [0.0], dt, t_max)
    sol = FluidSolution(t, y[:, 0], dy[:, 0], None, hit_label="soft_hit")
    level = 1.0 - SOFT_HIT_GAP
    T = hitting_time_fluid(sol, level) if np.any(sol.z >= level) else None
    return FluidSolution(sol.t, sol.z, sol.dz, T, "numeric", "soft_hit")


def solve_ctime_variance(model, fluid):
    """``beta`` and ``m`` for the continuous-time diffusion limit."""
    t, y, dy = integrate_variance(
        fluid,
        lambda z: float(model.rate(z)),
        lambda z: float(model.drift_coef(z)),
        lambda z: float(model.beta_rate(z)),
    )
    return DiffusionSolution(t, y[:, 1], y[:, 2], dy[:, 1], dy[:, 2], None, fluid)


def simulate_ctime_w_paths(model, fluid, t_end, dt=1e-3, n_paths=10_000, seed=0):
    """Euler-Maruyama paths of the continuous-time ``W`` on ``[0, t_end]``."""
    n = int(math.floor(t_end / dt + 1e-12))
    t = dt * np.arange(n + 1)
    if t_end - t[-1] > 1e-12:
        t = np.append(t, t_end)
    z = np.asarray(fluid(t))
    a = np.asarray(model.drift_coef(z), dtype=float) * np.ones_like(z)
    b = np.maximum(np.asarray(model.beta_rate(z), dtype=float), 0.0)
    return euler_maruyama(t, a, b, n_paths, seed)
