"""Greedy exploration on an explicitly sampled Erdos-Renyi graph.

This is the item-level procedure the chain abstracts: repeatedly activate a
uniformly chosen unexplored vertex and mark its unexplored neighbors as
explored. For ``N <= 1000`` the whole edge set is sampled up front and kept,
so independence of the active set can be checked; above that, edges at the
selected vertex are revealed on demand (deferred decisions).
"""

from dataclasses import dataclass

import numpy as np

from ._rng import GRAPH, chunks, fan_out, run_rng
from .errors import InvalidParameterError

MATERIALIZE_MAX_N = 1000


@dataclass
class ExplorationRun:
    N: int
    edge_prob: float
    active_count: int
    explored_trace: np.ndarray
    seed: int
    run_index: int = 0
    active: np.ndarray | None = None
    edges: np.ndarray | None = None

    def is_independent(self):
        if self.edges is None:
            raise ValueError("edges were not retained")
        mark = np.zeros(self.N, dtype=bool)
        mark[self.active] = True
        return not np.any(mark[self.edges[:, 0]] & mark[self.edges[:, 1]])

    def is_maximal(self):
        """Every inactive vertex has an active neighbor."""
        if self.edges is None:
            raise ValueError("edges were not retained")
        mark = np.zeros(self.N, dtype=bool)
        mark[self.active] = True
        covered = mark.copy()
        e = self.edges
        covered[e[mark[e[:, 0]], 1]] = True
        covered[e[mark[e[:, 1]], 0]] = True
        return bool(covered.all())


def _check(N, c):
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N!r}")
    if c < 0 or c > N:
        raise InvalidParameterError(f"c must lie in [0, N], got {c!r}")


def explore_er_graph(N, c, seed, run_index=0, materialize=None):
    """One greedy exploration of ``G(N, c / N)``.

    ``c = 0`` (empty graph) and ``c = N`` (complete graph) are accepted as
    boundary cases.
    """
    _check(N, c)
    p = c / N
    rng = run_rng(seed, run_index, GRAPH)
    if materialize is None:
        materialize = N <= MATERIALIZE_MAX_N
    if materialize:
        return _explore_materialized(N, p, rng, seed, run_index)
    return _explore_lazy(N, p, rng, seed, run_index)


def _explore_materialized(N, p, rng, seed, run_index):
    iu, ju = np.triu_indices(N, k=1)
    keep = rng.random(iu.size) < p
    edges = np.column_stack([iu[keep], ju[keep]])
    adj = np.zeros((N, N), dtype=bool)
    adj[edges[:, 0], edges[:, 1]] = True
    adj[edges[:, 1], edges[:, 0]] = True

    unexplored = np.ones(N, dtype=bool)
    active = []
    trace = []
    explored = 0
    while explored < N:
        pool = np.flatnonzero(unexplored)
        v = int(pool[rng.integers(pool.size)])
        active.append(v)
        unexplored[v] = False
        nb = adj[v] & unexplored
        unexplored[nb] = False
        explored += 1 + int(nb.sum())
        trace.append(explored)
    return ExplorationRun(N, p, len(active), np.array(trace), seed, run_index,
                          np.array(active), edges)


def _explore_lazy(N, p, rng, seed, run_index):
    # pool[:m] holds the unexplored vertices; explored ones are swapped past m
    pool = np.arange(N)
    m = N
    active = []
    trace = []
    while m > 0:
        i = int(rng.integers(m))
        v = pool[i]
        pool[i], pool[m - 1] = pool[m - 1], pool[i]
        m -= 1
        active.append(int(v))
        k = int(rng.binomial(m, p)) if m > 0 else 0
        # partial Fisher-Yates: move k uniform picks from pool[:m] to its tail
        for _ in range(k):
            j = int(rng.integers(m))
            pool[j], pool[m - 1] = pool[m - 1], pool[j]
            m -= 1
        trace.append(N - m)
    return ExplorationRun(N, p, len(active), np.array(trace), seed, run_index,
                          np.array(active), None)


def explore_batch(N, c, runs, seed, threads=1, run_start=0, materialize=None):
    """Active counts of ``runs`` independent explorations, in run-index order."""

    def work(idx):
        return np.array([explore_er_graph(N, c, seed, int(r), materialize).active_count
                         for r in idx])

    parts = fan_out(work, chunks(run_start, runs, 256), threads)
    return np.concatenate(parts)
