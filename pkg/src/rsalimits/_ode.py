"""Fixed-step RK4 and the cubic Hermite interpolant used for every ODE here."""

import math

import numpy as np
from scipy.interpolate import CubicHermiteSpline


def rk4(f, y0, dt, t_max, stop=None):
    """Integrate ``y' = f(y)`` with classical RK4 on the grid ``n * dt``.

    Args:
      f: autonomous right-hand side, maps an (d,) array to an (d,) array.
      y0: initial state.
      dt: step size.
      t_max: integration stops once the grid reaches ``t_max``.
      stop: optional predicate on the state; when it first holds, one more
        step is taken and integration ends.

    Returns:
      (t, y, dy): grid, states of shape (n, d) and ``f`` evaluated on them.
    """
    y = np.atleast_1d(np.asarray(y0, dtype=float))
    n_max = int(math.ceil(t_max / dt - 1e-9))
    ys = [y]
    extra = None
    for n in range(n_max):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys.append(y)
        if extra is not None:
            break
        if stop is not None and stop(y):
            extra = n
    ys = np.array(ys)
    t = dt * np.arange(len(ys))
    dy = np.array([f(v) for v in ys])
    return t, ys, dy


def hermite(t, y, dy):
    return CubicHermiteSpline(t, y, dy, axis=0, extrapolate=False)


def bisect(g, lo, hi, tol=1e-15, max_iter=200):
    """Root of a monotone ``g`` on ``[lo, hi]`` with ``g(lo) <= 0 <= g(hi)``."""
    glo = g(lo)
    if glo == 0.0:
        return lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)
