"""Discrete-time exploration chain ``Z_n = Z_{n-1} + 1 + xi_{Z_{n-1}}``.

Runs are simulated in lockstep across a chunk of independent runs; each run
reads its uniforms from its own stream, so results do not depend on chunking
or thread count. The compensator ``sum_{i<l} (1 + gamma_N(Z_i))`` is
accumulated with Kahan summation. Once a run is absorbed at ``N`` it stops
moving and its compensator stops growing, so ``M_l`` is frozen after the
hitting step.
"""

from dataclasses import dataclass, field

import numpy as np

from ._rng import CHAIN, UniformBlocks, chunks, fan_out, run_rng
from .errors import InsufficientSampleError, InvalidParameterError


@dataclass
class Trajectory:
    N: int
    z_values: np.ndarray
    m_values: np.ndarray
    hitting_step: int
    seed: int
    run_index: int

    @property
    def active_count(self):
        return self.hitting_step


@dataclass
class Batch:
    """Per-run records of a batch of chain runs, in ascending run index."""

    N: int
    seed: int
    run_indices: np.ndarray
    hitting_steps: np.ndarray
    kernel: dict
    sup_dev: np.ndarray | None = None
    record_steps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    z_rec: np.ndarray | None = None
    m_rec: np.ndarray | None = None
    qv_rec: np.ndarray | None = None
    paths: list | None = None

    @property
    def runs(self):
        return len(self.hitting_steps)

    @property
    def hitting_fractions(self):
        return self.hitting_steps / self.N

    def summary(self, source="chain"):
        h = self.hitting_fractions
        out = {
            "runs": self.runs,
            "N": self.N,
            "c": self.kernel.get("c"),
            "mean_hitting_fraction": float(h.mean()),
            "var_hitting_fraction": float(h.var(ddof=1)) if self.runs > 1 else 0.0,
            "seed": self.seed,
        }
        if source != "chain":
            out["source"] = source
        return out


def _run_chunk(kernel, seed, run_indices, zs, record_steps, store_paths):
    N = kernel.N
    R = len(run_indices)
    U = UniformBlocks([run_rng(seed, r, CHAIN) for r in run_indices])
    Z = np.zeros(R, dtype=np.int64)
    comp = np.zeros(R)
    comp_c = np.zeros(R)
    qv = np.zeros(R)
    hit = np.zeros(R, dtype=np.int64)
    alive = np.ones(R, dtype=bool)
    dev = np.zeros(R) if zs is not None else None

    L = len(record_steps)
    rec = {s: j for j, s in enumerate(record_steps)}
    z_rec = np.zeros((R, L), dtype=np.int64)
    m_rec = np.zeros((R, L))
    qv_rec = np.zeros((R, L))
    if store_paths:
        zp = np.full((R, N + 1), N, dtype=np.int64)
        mp = np.zeros((R, N + 1))
        zp[:, 0] = 0

    n = 0
    while alive.any():
        if n in rec:
            j = rec[n]
            z_rec[:, j] = Z
            m_rec[:, j] = Z - comp
            qv_rec[:, j] = qv
        if dev is not None:
            a = Z / N
            d = np.maximum(np.abs(a - zs[n]), np.abs(a - zs[n + 1]))
            dev = np.where(alive, np.maximum(dev, d), dev)
        x = Z
        k = kernel.quantile(U.column(n), np.minimum(x, N - 1))
        k = np.where(alive, k, 0)
        inc = np.where(alive, 1.0 + kernel.gamma_N(np.minimum(x, N - 1)), 0.0)
        qv += np.where(alive, kernel.psi_N(np.minimum(x, N - 1)), 0.0)
        y = inc - comp_c
        t = comp + y
        comp_c = (t - comp) - y
        comp = t
        Z = Z + np.where(alive, 1 + k, 0)
        n += 1
        newly = alive & (Z >= N)
        if newly.any():
            hit[newly] = n
            alive &= ~newly
            if dev is not None:
                dev = np.where(newly, np.maximum(dev, abs(1.0 - zs[n])), dev)
        if store_paths:
            zp[:, n] = Z
            mp[:, n] = Z - comp
    for s, j in rec.items():
        if s >= n:
            z_rec[:, j] = Z
            m_rec[:, j] = Z - comp
            qv_rec[:, j] = qv
    if store_paths:
        paths = [
            Trajectory(N, zp[i, : hit[i] + 1].copy(), mp[i, : hit[i] + 1].copy(),
                       int(hit[i]), seed, int(r))
            for i, r in enumerate(run_indices)
        ]
    else:
        paths = None
    return hit, dev, z_rec, m_rec, qv_rec, paths


def simulate(kernel, seed, run_index=0):
    """One complete trajectory of the chain, absorbed at ``N``."""
    b = simulate_batch(kernel, 1, seed, run_start=run_index, store_paths=True)
    return b.paths[0]


def simulate_batch(kernel, runs, seed, fluid=None, record_steps=None,
                   store_paths=False, threads=1, run_start=0, chunk_size=2048):
    """Simulate runs ``run_start .. run_start + runs - 1``.

    Args:
      fluid: when given, the exact ``sup_{t <= 1} |Z^N_t - min(z(t), 1)|``
        of every run is recorded in ``sup_dev``.
      record_steps: step indices ``l`` at which ``Z_l``, ``M_l`` and
        ``sum_{i<l} psi_N(Z_i)`` are recorded for every run.
      store_paths: keep full trajectories (memory ``runs * N``).
    """
    if runs < 1:
        raise InvalidParameterError("runs must be positive")
    N = kernel.N
    zs = None
    if fluid is not None:
        zs = np.asarray(fluid.stopped(np.arange(N + 1) / N), dtype=float)
    steps = np.array(sorted(set(int(s) for s in (record_steps or []))), dtype=np.int64)
    if steps.size and (steps[0] < 0 or steps[-1] > N):
        raise InvalidParameterError(f"record steps must lie in [0, {N}]")

    def work(idx):
        return _run_chunk(kernel, seed, idx, zs, steps.tolist(), store_paths)

    parts = fan_out(work, chunks(run_start, runs, chunk_size), threads)
    hit = np.concatenate([p[0] for p in parts])
    return Batch(
        N=N,
        seed=seed,
        run_indices=np.arange(run_start, run_start + runs),
        hitting_steps=hit,
        kernel=kernel.describe(),
        sup_dev=np.concatenate([p[1] for p in parts]) if zs is not None else None,
        record_steps=steps,
        z_rec=np.concatenate([p[2] for p in parts]),
        m_rec=np.concatenate([p[3] for p in parts]),
        qv_rec=np.concatenate([p[4] for p in parts]),
        paths=sum((p[5] for p in parts), []) if store_paths else None,
    )


class ScaledPath:
    """Right-continuous step function ``t -> Z_{[tN]} / N`` on ``[0, 1]``."""

    def __init__(self, traj):
        self.N = traj.N
        self._z = np.asarray(traj.z_values)
        self.hitting_step = traj.hitting_step

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = np.floor(t * self.N + 1e-9).astype(np.int64)
        out = np.where(n >= self.hitting_step, 1.0,
                       self._z[np.clip(n, 0, self.hitting_step)] / self.N)
        return float(out) if out.ndim == 0 else out

    def on_grid(self, points=1001):
        t = np.linspace(0.0, 1.0, points)
        return t, self(t)

    def sup_deviation(self, fluid):
        """Exact ``sup_{t <= 1} |Z^N_t - min(z(t), 1)|``."""
        N = self.N
        zs = np.asarray(fluid.stopped(np.arange(N + 1) / N))
        T = self.hitting_step
        a = self._z[:T] / N
        left = np.abs(a - zs[:T])
        right = np.abs(a - zs[1:T + 1])
        return float(max(left.max(initial=0.0), right.max(initial=0.0), abs(1.0 - zs[T])))


def scaled_path(traj):
    return ScaledPath(traj)


@dataclass
class MartingaleDiagnostics:
    steps: np.ndarray
    mean_M: np.ndarray
    sd_M: np.ndarray
    mean_M2: np.ndarray
    predicted_M2: np.ndarray
    runs: int

    @property
    def ratio(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.predicted_M2 > 0, self.mean_M2 / self.predicted_M2, np.nan)

    @property
    def z_scores(self):
        se = self.sd_M / np.sqrt(self.runs)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(se > 0, self.mean_M / se, 0.0)


def martingale_diagnostics(batch, steps, kernel=None):
    """Empirical ``E[M_l]``, ``E[M_l^2]`` and the predicted ``E[sum_{i<l} psi_N(Z_i)]``.

    ``batch`` is a :class:`Batch` that recorded ``steps``, or a sequence of
    :class:`Trajectory` (then ``kernel`` is needed to evaluate ``psi_N``).
    """
    steps = np.asarray(steps, dtype=np.int64)
    if isinstance(batch, Batch):
        if batch.runs < 2:
            raise InsufficientSampleError("need at least 2 runs")
        pos = {int(s): j for j, s in enumerate(batch.record_steps)}
        missing = [int(s) for s in steps if int(s) not in pos]
        if missing:
            raise InvalidParameterError(f"steps {missing} were not recorded")
        cols = [pos[int(s)] for s in steps]
        M = batch.m_rec[:, cols]
        Q = batch.qv_rec[:, cols]
    else:
        trajs = list(batch)
        if len(trajs) < 2:
            raise InsufficientSampleError("need at least 2 runs")
        if kernel is None:
            raise InvalidParameterError("kernel required for trajectory input")
        M = np.empty((len(trajs), len(steps)))
        Q = np.empty_like(M)
        for i, tr in enumerate(trajs):
            T = tr.hitting_step
            psi = kernel.psi_N(tr.z_values[:T])
            cq = np.concatenate([[0.0], np.cumsum(psi)])
            ll = np.minimum(steps, T)
            M[i] = tr.m_values[ll]
            Q[i] = cq[ll]
    runs = M.shape[0]
    return MartingaleDiagnostics(
        steps=steps,
        mean_M=M.mean(axis=0),
        sd_M=M.std(axis=0, ddof=1),
        mean_M2=(M ** 2).mean(axis=0),
        predicted_M2=Q.mean(axis=0),
        runs=runs,
    )
