import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsalimits.diffusion import (clt_prediction, er_m_closed_form, er_sigma_sq, simulate_w_paths,
                                 solve_variance_ode)
from rsalimits.errors import DegenerateNormalizationError, NegativeDiffusionError
from rsalimits.fluid import solve_fluid
from rsalimits.kernel import Limits, deterministic_kernel, er_kernel, tabular_kernel


def _er(c, N=10_000):
    k = er_kernel(N, c)
    return k, solve_fluid(k)


def test_m_closed_form_hand_value():
    # c = 1, t = ln 2: e^{-2t} = 1/4, (1 - 2)(2 - 3) / 2 = 1/2
    assert er_m_closed_form(math.log(2), 1.0) == pytest.approx(0.125, abs=1e-15)


def test_m_closed_form_solves_ode():
    # m' = 2 gamma'(z) m + psi(z) with gamma' = -c and psi = c (1 - z), z = rho (1 - e^{-ct})
    c = 1.7
    t = np.linspace(0.01, 1.0, 50)
    h = 1e-6
    dm = (er_m_closed_form(t + h, c) - er_m_closed_form(t - h, c)) / (2 * h)
    z = (1 + c) / c * (1 - np.exp(-c * t))
    rhs = -2 * c * er_m_closed_form(t, c) + c * (1 - z)
    assert np.allclose(dm, rhs, atol=1e-8)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_variance_ode_matches_closed_form(c):
    k, fl = _er(c)
    d = solve_variance_ode(fl, k)
    assert np.max(np.abs(d.m - er_m_closed_form(d.t, c))) < 1e-6
    assert d.sigma_sq == pytest.approx(c / (2 * (c + 1) ** 2), abs=1e-8)
    # beta' = psi(z(t)) = (1 + c) e^{-ct} - 1
    assert np.allclose(d.dbeta, (1 + c) * np.exp(-c * d.t) - 1, atol=1e-9)
    assert d.beta[0] == 0 and d.m[0] == 0


def test_sigma_sq_hand_values():
    assert er_sigma_sq(1.0) == 0.125
    assert er_sigma_sq(2.0) == pytest.approx(2 / 18, abs=1e-15)
    k, fl = _er(1.0)
    assert solve_variance_ode(fl, k).m_at(fl.T_star) == pytest.approx(1 / 8, abs=1e-8)


def test_clt_prediction_values():
    T, s = clt_prediction(er_kernel(10_000, 1.0))
    assert T == pytest.approx(0.693147, abs=1e-6) and s == pytest.approx(0.125, abs=1e-8)
    T, s = clt_prediction(er_kernel(10_000, 2.0))
    assert T == pytest.approx(0.549306, abs=1e-6) and s == pytest.approx(0.111111, abs=1e-6)
    T, s = clt_prediction(deterministic_kernel(50))
    assert T == pytest.approx(1.0, abs=1e-12) and s == 0.0


def test_no_noise_kernel(det_kernel):
    fl = solve_fluid(det_kernel)
    d = solve_variance_ode(fl, det_kernel)
    assert np.all(d.m == 0) and d.sigma_sq == 0
    w = simulate_w_paths(fl, det_kernel, n_paths=100, seed=1)
    assert np.all(w.final == 0) and np.all(w.var == 0)


@settings(max_examples=15, deadline=None)
@given(c=st.floats(0.1, 4.0))
def test_beta_and_m_shape(c):
    k, fl = _er(c)
    d = solve_variance_ode(fl, k)
    mask = d.t <= fl.T_star
    assert np.all(np.diff(d.beta[mask]) >= -1e-15)
    assert np.all(d.m >= -1e-15)
    assert d.sigma_sq == pytest.approx(er_sigma_sq(c), abs=1e-8)


def test_degenerate_normalization():
    # gamma == 1 puts gamma(1) = 1
    k = tabular_kernel(4, {(0, 0): 1.0}, Limits.polynomial([1.0], [0.0]))
    fl = solve_fluid(k)
    with pytest.raises(DegenerateNormalizationError):
        solve_variance_ode(fl, k)
    with pytest.raises(DegenerateNormalizationError):
        clt_prediction(k)


def test_negative_diffusion_rejected():
    k = tabular_kernel(4, {(0, 0): 1.0}, Limits.polynomial([0.0], [-0.5]))
    fl = solve_fluid(k)
    with pytest.raises(NegativeDiffusionError):
        simulate_w_paths(fl, k, n_paths=10, seed=0)


def test_tiny_negative_diffusion_clamped():
    k = tabular_kernel(4, {(0, 0): 1.0}, Limits.polynomial([0.0], [-1e-12]))
    fl = solve_fluid(k)
    with pytest.warns(RuntimeWarning):
        w = simulate_w_paths(fl, k, n_paths=10, seed=0)
    assert np.all(w.final == 0)


@pytest.fixture(scope="module")
def er1_paths():
    k, fl = _er(1.0)
    d = solve_variance_ode(fl, k)
    return d, simulate_w_paths(fl, k, dt=1e-3, n_paths=100_000, seed=7)


def test_em_variance_at_T_star(er1_paths):
    d, w = er1_paths
    m = d.m_at(w.t[-1])
    assert abs(w.var[-1] - m) <= 3 * math.sqrt(2 / w.n_paths) * m


def test_em_mean_zero(er1_paths):
    d, w = er1_paths
    m = d.m_at(w.t[-1])
    assert abs(w.mean[-1]) <= 3 * math.sqrt(m / w.n_paths)


def test_ito_consistency(er1_paths):
    # increments of the empirical variance over a coarse grid against those of m;
    # Var(W_b^2 - W_a^2) <= 2 (m_a^2 + m_b^2) for centered Gaussians
    d, w = er1_paths
    idx = np.arange(0, len(w.t), 100)
    for a, b in zip(idx, idx[1:]):
        dm = d.m_at(w.t[b]) - d.m_at(w.t[a])
        dv = w.var[b] - w.var[a]
        se = math.sqrt(2 * (d.m_at(w.t[a]) ** 2 + d.m_at(w.t[b]) ** 2) / w.n_paths)
        assert abs(dv - dm) <= 4 * se + 1e-4


def test_w_paths_reproducible():
    k, fl = _er(1.0, N=1000)
    a = simulate_w_paths(fl, k, n_paths=5000, seed=3)
    b = simulate_w_paths(fl, k, n_paths=5000, seed=3)
    assert np.array_equal(a.final, b.final)
    assert a.t[-1] == pytest.approx(fl.T_star, abs=1e-15)
