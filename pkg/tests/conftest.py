import math

import numpy as np

import pytest

from rsalimits.kernel import complete_graph_kernel, deterministic_kernel, er_kernel


@pytest.fixture
def er_small():
    return er_kernel(100, 2.0)


@pytest.fixture
def det_kernel():
    return deterministic_kernel(50)


@pytest.fixture
def complete3():
    return complete_graph_kernel(3)


def binom_pmf(k, n, p):
    """Exact binomial mass from integer arithmetic (independent of scipy)."""
    if k < 0 or k > n:
        return 0.0
    return math.comb(n, k) * p ** k * (1.0 - p) ** (n - k)


def exact_hitting_moments(N, c):
    """E[T] and E[T^2] of the ER chain by backward recursion over states."""
    p = c / N
    e1 = np.zeros(N + 1)
    e2 = np.zeros(N + 1)
    for x in range(N - 1, -1, -1):
        n = N - x - 1
        w = [binom_pmf(k, n, p) for k in range(n + 1)]
        nxt1 = sum(w[k] * e1[x + 1 + k] for k in range(n + 1))
        nxt2 = sum(w[k] * e2[x + 1 + k] for k in range(n + 1))
        e1[x] = 1 + nxt1
        e2[x] = 1 + 2 * nxt1 + nxt2
    return e1[0], e2[0]
