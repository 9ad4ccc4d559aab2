"""Non-asymptotic error budgets for the fluid approximation."""

import math
from dataclasses import asdict, dataclass

from .errors import InvalidParameterError


def kappa(p):
    """Doob constant ``p / (p - 1)``."""
    if p <= 1:
        raise InvalidParameterError(f"p must exceed 1, got {p!r}")
    return p / (p - 1.0)


def omega(kernel, T):
    """L2 envelope ``(delta_N T + 2 sqrt(2 C_N T)) exp(C_L T)`` with ``C_N = psi_bar_N / N``.

    The ER kernel contributes its budget bound ``psi_bar_N <= c``.
    """
    if T <= 0:
        raise InvalidParameterError("T must be positive")
    C_N = kernel.psi_bound / kernel.N
    return (kernel.delta_N * T + 2.0 * math.sqrt(2.0 * C_N * T)) * math.exp(kernel.C_L * T)


def lp_sup_bound(kernel, T, p, m_norm=None):
    """Envelope ``exp(C_L T) (delta_N T + kappa_p ||M_T^N||_p)``.

    For ``p = 2`` the martingale norm defaults to ``sqrt(C_N T)``; for other
    ``p`` the caller must pass an estimate of ``||M_T^N||_p``.
    """
    kp = kappa(p)
    if m_norm is None:
        if p != 2:
            raise InvalidParameterError("an estimate of ||M_T||_p is required for p != 2")
        m_norm = math.sqrt(kernel.psi_bound / kernel.N * T)
    return math.exp(kernel.C_L * T) * (kernel.delta_N * T + kp * m_norm)


def poisson_n_factor(h):
    """``((1 - exp(-h)) / h)^(1/2)``, i.e. ``E[1/N]^(1/2)`` when ``N - 1 ~ Poisson(h)``."""
    if h <= 0:
        raise InvalidParameterError("h must be positive")
    return math.sqrt(-math.expm1(-h) / h)


@dataclass
class ErrorBudget:
    N: int
    T: float
    delta_N: float
    C_L: float
    psi_bar_N: float
    gamma_bar_N: float
    C_N: float
    omega_N: float
    lp2_bound: float
    poisson_N_factor: float | None = None

    def lp_bound(self, p, m_norm):
        return math.exp(self.C_L * self.T) * (self.delta_N * self.T + kappa(p) * m_norm)

    def to_dict(self):
        return asdict(self)


def error_budget(kernel, T=1.0, h=None):
    return ErrorBudget(
        N=kernel.N,
        T=float(T),
        delta_N=float(kernel.delta_N),
        C_L=float(kernel.C_L),
        psi_bar_N=float(kernel.psi_bound),
        gamma_bar_N=float(kernel.gamma_bar_N),
        C_N=float(kernel.psi_bound / kernel.N),
        omega_N=omega(kernel, T),
        lp2_bound=lp_sup_bound(kernel, T, 2),
        poisson_N_factor=poisson_n_factor(h) if h is not None else None,
    )
