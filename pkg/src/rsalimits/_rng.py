"""Per-run random streams.

Every run gets its own Philox stream keyed by ``(seed, run_index, tag)``
through ``SeedSequence``, so a run's draws never depend on which other
runs exist or which worker executes it.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHAIN, GRAPH, CTIME, WPATHS = 0, 1, 2, 3


def run_rng(seed, run_index, tag=CHAIN):
    if seed is None:
        raise ValueError("an explicit integer seed is required")
    ss = np.random.SeedSequence([int(seed), int(run_index), int(tag)])
    return np.random.Generator(np.random.Philox(ss))


class UniformBlocks:
    """Column-blocked uniforms in ``(0, 1]`` from one stream per run."""

    def __init__(self, rngs, block=1024):
        self.rngs = rngs
        self.block = block
        self._start = 0
        self._buf = None

    def column(self, n):
        if self._buf is None or n >= self._start + self.block:
            self._start = (n // self.block) * self.block
            self._buf = np.stack([1.0 - g.random(self.block) for g in self.rngs])
        return self._buf[:, n - self._start]


def chunks(run_start, runs, size):
    out = []
    for lo in range(run_start, run_start + runs, size):
        out.append(np.arange(lo, min(lo + size, run_start + runs)))
    return out


def fan_out(fn, items, threads=1):
    """Apply ``fn`` to ``items``; results come back in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))
