"""Fluid limit ``z' = 1 + gamma(z)`` of the scaled exploration chain."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._ode import bisect, hermite, rk4
from .errors import InvalidParameterError, NoHittingError


@dataclass(frozen=True)
class FluidSolution:
    """A solution ``z(t)`` on a uniform grid, with its first hitting time of 1.

    Evaluation between grid points uses the cubic Hermite interpolant built
    from the grid values and the exact slopes, unless a closed form is
    attached, in which case that is used instead.
    """

    t: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    T_star: float | None
    provenance: str = "numeric"
    hit_label: str = "hit"
    exact: object = field(default=None, repr=False, compare=False)

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def __post_init__(self):
        object.__setattr__(self, "_interp", hermite(self.t, self.z, self.dz))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.exact is not None:
            out = np.asarray(self.exact(t))
            return float(out) if out.ndim == 0 else out
        if np.any(t < 0) or np.any(t > self.t[-1] + 1e-12):
            raise InvalidParameterError(
                f"t outside the solved window [0, {self.t[-1]}]")
        out = self._interp(np.minimum(t, self.t[-1]))
        return float(out) if out.ndim == 0 else out

    def stopped(self, t):
        """``min(z(t), 1)``: the fluid path frozen once it reaches 1."""
        t = np.asarray(t, dtype=float)
        if self.T_star is None:
            return np.minimum(self(t), 1.0)
        inside = np.minimum(t, self.T_star)
        out = np.where(t >= self.T_star, 1.0, np.minimum(self(inside), 1.0))
        return float(out) if out.ndim == 0 else out


def _gamma_of(limits):
    return limits.gamma if hasattr(limits, "gamma") else limits


def solve_fluid(limits, dt=1e-3, t_max=10.0):
    """Integrate ``z' = 1 + gamma(z)`` from ``z(0) = 0`` with RK4.

    ``limits`` is a kernel (its ``gamma`` is used) or a bare callable.
    Integration ends one step after the grid first reaches ``z >= 1``.
    """
    if dt <= 0 or dt > 1e-2:
        raise InvalidParameterError(f"dt must lie in (0, 1e-2], got {dt!r}")
    gamma = _gamma_of(limits)

    def f(y):
        return 1.0 + np.asarray(gamma(y), dtype=float)

    t, y, dy = rk4(f, [0.0], dt, t_max, stop=lambda y: y[0] >= 1.0)
    z = y[:, 0]
    if not np.any(z >= 1.0):
        raise NoHittingError(f"z stays below 1 on [0, {t[-1]:.6g}] (z_max={z.max():.6g})")
    sol = FluidSolution(t, z, dy[:, 0], None)
    return _with_hit(sol, 1.0)


def _with_hit(sol, level, label="hit"):
    T = hitting_time_fluid(sol, level)
    return FluidSolution(sol.t, sol.z, sol.dz, T, sol.provenance, label, sol.exact)


def hitting_time_fluid(sol, level=1.0):
    """First ``t`` with ``z(t) = level``, by bisection on the interpolant."""
    idx = np.flatnonzero(sol.z >= level)
    if idx.size == 0:
        raise NoHittingError(f"solution never reaches {level}")
    i = int(idx[0])
    if i == 0:
        return 0.0
    lo, hi = float(sol.t[i - 1]), float(sol.t[i])
    interp = sol._interp
    return bisect(lambda s: float(interp(s)) - level, lo, hi)


def er_closed_form(c, dt=1e-3):
    """ER fluid path ``rho (1 - exp(-c t))`` with ``rho = (1 + c) / c``."""
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    rho = (1.0 + c) / c
    T = math.log1p(c) / c

    def exact(t):
        return rho * -np.expm1(-c * t)

    n = int(math.ceil(T / dt)) + 1
    t = dt * np.arange(n + 1)
    z = exact(t)
    dz = (1.0 + c) * np.exp(-c * t)
    return FluidSolution(t, z, dz, T, "closed_form", "hit", exact)


def er_rho(c):
    return (1.0 + c) / c
