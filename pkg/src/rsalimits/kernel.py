"""Neighbor-count kernels for the homogeneous exploration chain.

A kernel gives the law of the number of unexplored neighbors ``xi_x`` of a
freshly activated item when ``x`` items are already explored, together with
the scaling-limit functions used by the fluid and diffusion limits.

``x`` is always an integer count; limit functions take ``z = x / N``.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import stats

from .errors import InvalidParameterError, MalformedTableError

# Above this mean the sequential inversion search gets long, so the
# binomial quantile is delegated to scipy.
_INVERSION_MEAN_LIMIT = 30.0


class Kernel:
    """Common interface. Subclasses fill in the moments and the sampler."""

    N: int
    C_L: float

    def pmf(self, k, x):
        raise NotImplementedError

    def pmf_row(self, x):
        """Masses ``pmf(k, x)`` for ``k = 0 .. N - x - 1``."""
        k = np.arange(self.N - x)
        return self.pmf(k, x)

    def gamma_N(self, x):
        raise NotImplementedError

    def psi_N(self, x):
        raise NotImplementedError

    def gamma(self, z):
        raise NotImplementedError

    def gamma_prime(self, z):
        raise NotImplementedError

    def gamma_second(self, z):
        raise NotImplementedError

    def psi(self, z):
        raise NotImplementedError

    def quantile(self, u, x):
        """Inverse CDF: smallest ``k`` with ``P(xi_x <= k) >= u``, ``u in (0, 1]``."""
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError

    @property
    def delta_N(self):
        x = np.arange(self.N)
        return float(np.max(np.abs(self.gamma_N(x) - self.gamma(x / self.N))))

    @property
    def gamma_bar_N(self):
        return float(np.max(self.gamma_N(np.arange(self.N))))

    @property
    def psi_bar_N(self):
        return float(np.max(self.psi_N(np.arange(self.N))))

    @property
    def psi_bound(self):
        """Upper bound on ``psi_bar_N`` used in error budgets."""
        return self.psi_bar_N

    def _check_x(self, x):
        x = np.asarray(x)
        if np.any(x < 0) or np.any(x >= self.N):
            raise InvalidParameterError(f"x must lie in [0, {self.N - 1}]")
        return x


def sample_xi(kernel, x, rng):
    """Draw one neighbor count ``xi_x`` from ``kernel`` using ``rng``."""
    x = int(kernel._check_x(x))
    u = 1.0 - rng.random()
    return int(kernel.quantile(np.array([u]), np.array([x]))[0])


class ErKernel(Kernel):
    """Erdos-Renyi G(N, c/N): ``xi_x ~ Binomial(N - x - 1, c / N)``."""

    def __init__(self, N, c):
        if int(N) != N or N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {N!r}")
        if not (c > 0) or c >= N:
            raise InvalidParameterError(
                f"c must satisfy 0 < c < N so that c/N is in (0, 1); got c={c!r}, N={N!r}")
        self.N = int(N)
        self.c = float(c)
        self.p = self.c / self.N
        self.C_L = self.c

    def pmf(self, k, x):
        x = self._check_x(x)
        return stats.binom.pmf(k, self.N - x - 1, self.p)

    def gamma_N(self, x):
        return (self.N - np.asarray(x) - 1) * self.p

    def psi_N(self, x):
        return (self.N - np.asarray(x) - 1) * self.p * (1.0 - self.p)

    def gamma(self, z):
        return self.c * (1.0 - np.asarray(z, dtype=float))

    def gamma_prime(self, z):
        return np.full(np.shape(z), -self.c) if np.ndim(z) else -self.c

    def gamma_second(self, z):
        return np.zeros(np.shape(z)) if np.ndim(z) else 0.0

    psi = gamma

    @property
    def delta_N(self):
        return self.p

    @property
    def gamma_bar_N(self):
        return (self.N - 1) * self.p

    @property
    def psi_bar_N(self):
        return (self.N - 1) * self.p * (1.0 - self.p)

    @property
    def psi_bound(self):
        return self.c

    def quantile(self, u, x):
        u = np.asarray(u, dtype=float)
        n = np.maximum(self.N - np.asarray(x) - 1, 0).astype(float)
        out = np.zeros(u.shape, dtype=np.int64)
        big = n * self.p >= _INVERSION_MEAN_LIMIT
        if np.any(big):
            out[big] = stats.binom.ppf(u[big], n[big], self.p).astype(np.int64)
        small = ~big
        if np.any(small):
            out[small] = _binomial_inversion(u[small], n[small], self.p)
        return out

    def describe(self):
        return {"type": "er", "N": self.N, "c": self.c}


def _binomial_inversion(u, n, p):
    # Sequential search using pmf(k+1) = pmf(k) * (n - k) / (k + 1) * p / q.
    r = p / (1.0 - p)
    pmf = np.exp(n * math.log1p(-p))
    cdf = pmf.copy()
    k = np.zeros(u.shape, dtype=np.int64)
    todo = np.flatnonzero(u > cdf)
    j = 0
    while todo.size:
        j += 1
        nn = n[todo]
        pmf_t = pmf[todo] * (nn - j + 1) / j * r
        cdf_t = cdf[todo] + pmf_t
        pmf[todo] = pmf_t
        cdf[todo] = cdf_t
        k[todo] = j
        # rounding can leave cdf a hair below u; k never exceeds n
        keep = (u[todo] > cdf_t) & (j < nn)
        todo = todo[keep]
    return k


def er_kernel(N, c):
    return ErKernel(N, c)


def poisson_limit_pmf(k, x, c):
    """Poisson(c (1 - x)) mass at ``k``, the large-N limit of the ER kernel."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise InvalidParameterError("x must lie in [0, 1]")
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    mu = c * (1.0 - x)
    out = stats.poisson.pmf(k, mu)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Limits:
    """Scaling-limit functions of a kernel given as callables."""

    gamma: object
    gamma_prime: object
    gamma_second: object
    psi: object
    C_L: float

    @classmethod
    def polynomial(cls, gamma_coef, psi_coef, C_L=None):
        """Limits from polynomial coefficients in increasing degree."""
        g = Polynomial(gamma_coef)
        dg = g.deriv()
        d2g = dg.deriv()
        if C_L is None:
            C_L = _poly_lipschitz(dg, 0.0, 2.0)
        return cls(g, dg, d2g, Polynomial(psi_coef), float(C_L))


def _poly_lipschitz(dg, a, b):
    cand = [a, b]
    if dg.degree() >= 1:
        cand += [r.real for r in dg.deriv().roots() if abs(r.imag) < 1e-12 and a <= r.real <= b]
    return float(max(abs(dg(t)) for t in cand))


class TabularKernel(Kernel):
    """Kernel read from a table of masses, piecewise constant in ``x``.

    ``table`` maps ``(k, x_bucket) -> probability``. Bucket keys are the
    first ``x`` of each bucket; a bucket extends to the next key (the last
    one to ``N - 1``). Bucket 0 must be present.
    """

    def __init__(self, N, table, limits):
        if int(N) != N or N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {N!r}")
        self.N = N = int(N)
        if not isinstance(limits, Limits):
            limits = Limits.polynomial(**limits)
        self.limits = limits
        self.C_L = limits.C_L

        if not table:
            raise MalformedTableError("empty table")
        edges = sorted({int(xb) for _, xb in table})
        if edges[0] != 0 or edges[-1] >= N:
            raise MalformedTableError(f"bucket starts must begin at 0 and stay below N={N}")
        kmax = max(int(k) for k, _ in table)
        P = np.zeros((len(edges), kmax + 1))
        pos = {e: i for i, e in enumerate(edges)}
        for (k, xb), prob in table.items():
            if k < 0:
                raise MalformedTableError(f"negative k={k}")
            if prob < 0:
                raise MalformedTableError(f"negative mass at k={k}, bucket {xb}")
            P[pos[int(xb)], int(k)] += prob
        ends = edges[1:] + [N]
        for i, (lo, hi) in enumerate(zip(edges, ends)):
            s = P[i].sum()
            if abs(s - 1.0) > 1e-9:
                raise MalformedTableError(f"bucket {lo} sums to {s!r}, not 1")
            support = np.flatnonzero(P[i] > 0)
            # last x in the bucket is hi - 1, which allows k <= N - hi
            if support.size and support[-1] > N - hi:
                raise MalformedTableError(
                    f"bucket {lo}: mass at k={support[-1]} exceeds N - x - 1 for x={hi - 1}")
            P[i] /= s
        self._edges = np.array(edges)
        self._P = P
        cdf = np.cumsum(P, axis=1)
        for i in range(len(edges)):
            last = np.flatnonzero(P[i] > 0)[-1]
            cdf[i, last:] = 1.0
        self._cdf = cdf
        k = np.arange(kmax + 1)
        self._mean = P @ k
        self._var = P @ (k * k) - self._mean ** 2
        self._var = np.maximum(self._var, 0.0)

    def _bucket(self, x):
        return np.searchsorted(self._edges, np.asarray(x), side="right") - 1

    def pmf(self, k, x):
        x = self._check_x(x)
        k = np.asarray(k)
        b = self._bucket(x)
        kk = np.clip(k, 0, self._P.shape[1] - 1)
        out = self._P[b, kk]
        return np.where((k >= 0) & (k < self._P.shape[1]) & (k <= self.N - x - 1), out, 0.0)

    def gamma_N(self, x):
        return self._mean[self._bucket(x)]

    def psi_N(self, x):
        return self._var[self._bucket(x)]

    def gamma(self, z):
        return self.limits.gamma(np.asarray(z, dtype=float))

    def gamma_prime(self, z):
        return self.limits.gamma_prime(np.asarray(z, dtype=float))

    def gamma_second(self, z):
        return self.limits.gamma_second(np.asarray(z, dtype=float))

    def psi(self, z):
        return self.limits.psi(np.asarray(z, dtype=float))

    def quantile(self, u, x):
        b = self._bucket(x)
        u = np.asarray(u, dtype=float)
        return np.sum(self._cdf[b] < u[:, None], axis=1).astype(np.int64)

    def describe(self):
        return {"type": "table", "N": self.N, "buckets": int(len(self._edges))}


def tabular_kernel(N, table, limits):
    return TabularKernel(N, table, limits)


def deterministic_kernel(N):
    """All mass at ``k = 0``: the chain moves by exactly one each step."""
    return TabularKernel(N, {(0, 0): 1.0}, Limits.polynomial([0.0], [0.0], C_L=0.0))


def complete_graph_kernel(N):
    """Every unexplored item is a neighbor: ``xi_x = N - x - 1``."""
    table = {(N - x - 1, x): 1.0 for x in range(N)}
    return TabularKernel(N, table, Limits.polynomial([N, -N], [0.0]))
