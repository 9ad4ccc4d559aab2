import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from conftest import binom_pmf
from rsalimits.errors import InvalidParameterError, MalformedTableError
from rsalimits.kernel import (Limits, complete_graph_kernel, deterministic_kernel, er_kernel,
                              poisson_limit_pmf, sample_xi, tabular_kernel)
from rsalimits._rng import run_rng


def test_er_gamma_N_hand_value():
    k = er_kernel(100, 2.0)
    assert k.gamma_N(49) == pytest.approx(1.0, abs=1e-15)


def test_er_gamma_N_vanishes_at_last_item():
    assert er_kernel(10, 3.0).gamma_N(9) == 0


def test_er_gamma_limit_and_delta():
    k = er_kernel(100, 2.0)
    assert k.gamma(0.5) == pytest.approx(1.0)
    gap = abs(k.gamma_N(49) - k.gamma(49 / 100))
    assert gap == pytest.approx(0.02, abs=1e-12)
    assert k.delta_N == pytest.approx(0.02)
    assert gap <= k.delta_N + 1e-15


def test_er_constants():
    k = er_kernel(1000, 1.5)
    assert k.C_L == 1.5
    assert k.psi_bar_N <= 1.5
    assert k.gamma_bar_N <= 1.5
    assert k.psi(0.3) == pytest.approx(1.5 * 0.7)


@pytest.mark.parametrize("N,c", [(0, 1.0), (10, 0.0), (10, -1.0), (10, 10.0), (10, 12.0)])
def test_er_rejects_bad_parameters(N, c):
    with pytest.raises(InvalidParameterError):
        er_kernel(N, c)


def test_er_pmf_matches_exact_binomial():
    N, c = 60, 2.5
    k = er_kernel(N, c)
    for x in (0, 13, 30, 58, 59):
        row = k.pmf_row(x)
        ref = [binom_pmf(j, N - x - 1, c / N) for j in range(N - x)]
        np.testing.assert_allclose(row, ref, rtol=1e-12, atol=1e-300)


def test_er_pmf_zero_outside_support():
    k = er_kernel(20, 1.0)
    assert k.pmf(np.array([-1, 20, 5]), 15).tolist()[:2] == [0.0, 0.0]
    assert k.pmf(5, 15) == 0.0  # support is 0..4 at x = 15


def test_er_exhaustive_normalization_and_moments():
    N, c = 1000, 1.0
    k = er_kernel(N, c)
    for x in range(N):
        row = k.pmf_row(x)
        j = np.arange(row.size)
        mean = float(row @ j)
        var = float(row @ (j - mean) ** 2)
        assert abs(row.sum() - 1.0) <= 1e-12
        assert abs(mean - k.gamma_N(x)) <= 1e-10
        assert abs(var - k.psi_N(x)) <= 1e-10


def test_er_delta_exhaustive_large_N():
    N, c = 10_000, 1.3
    k = er_kernel(N, c)
    x = np.arange(N)
    gaps = np.abs(k.gamma_N(x) - k.gamma(x / N))
    assert gaps.max() <= k.delta_N + 1e-12
    assert np.all(k.psi_N(x) <= k.psi_bar_N) and np.all(k.gamma_N(x) <= k.gamma_bar_N)


def test_lipschitz_on_grid():
    for k in (er_kernel(100, 2.0),
              tabular_kernel(10, {(0, 0): 1.0}, Limits.polynomial([1.0, -2.0, 0.5], [0.0]))):
        z = np.linspace(0, 2, 201)
        g = k.gamma(z)
        diff = np.abs(g[:, None] - g[None, :])
        dz = np.abs(z[:, None] - z[None, :])
        assert np.all(diff <= k.C_L * dz + 1e-12)


def test_poisson_limit_pmf_examples():
    assert poisson_limit_pmf(0, 1.0, 5.0) == 1.0
    assert poisson_limit_pmf(1, 0.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)
    assert poisson_limit_pmf(2, 0.5, 2.0) == pytest.approx(math.exp(-1) / 2, rel=1e-14)
    with pytest.raises(InvalidParameterError):
        poisson_limit_pmf(0, 1.5, 1.0)


def test_stein_chen_ratio_reported():
    # |p_N - p| <= kappa * (c/N) p over k <= 30 and x in {0, N/4, N/2, 3N/4}
    N, c = 1000, 1.0
    k = er_kernel(N, c)
    ks = np.arange(31)
    kappa = 0.0
    for x in (0, N // 4, N // 2, 3 * N // 4):
        p = np.array([math.exp(-c * (1 - x / N)) * (c * (1 - x / N)) ** j / math.factorial(j)
                      for j in ks])
        kappa = max(kappa, float(np.max(np.abs(k.pmf(ks, x) - p) * N / (c * p))))
    print(f"fitted Stein-Chen kappa = {kappa:.3f}")
    # the unit-constant inequality breaks down in the far tail; small k is fine
    small = np.arange(3)
    p0 = np.array([poisson_limit_pmf(j, 0.0, c) for j in small])
    assert np.all(np.abs(k.pmf(small, 0) - p0) <= (c / N) * p0)
    assert kappa > 1.0


def test_sample_xi_last_item_is_zero():
    k = er_kernel(50, 0.01)
    rng = run_rng(3, 0)
    assert all(sample_xi(k, 49, rng) == 0 for _ in range(200))


def test_sample_xi_domain():
    with pytest.raises(InvalidParameterError):
        sample_xi(er_kernel(10, 1.0), 10, run_rng(0, 0))


def test_sample_xi_deterministic_given_state():
    k = er_kernel(1000, 2.0)
    a = [sample_xi(k, 10, run_rng(9, 4)) for _ in range(3)]
    b = [sample_xi(k, 10, run_rng(9, 4)) for _ in range(3)]
    assert a == b


def test_quantile_er_mean_monte_carlo():
    k = er_kernel(10_000, 1.0)
    u = 1.0 - run_rng(1, 0).random(10**6)
    draws = k.quantile(u, np.zeros(u.size, dtype=int))
    assert abs(draws.mean() - 0.9999) < 3e-3


def test_quantile_tabular_mean_monte_carlo():
    k = tabular_kernel(10, {(0, 0): 0.5, (1, 0): 0.5, (0, 9): 1.0},
                       Limits.polynomial([0.5], [0.25]))
    u = 1.0 - run_rng(2, 0).random(10**6)
    draws = k.quantile(u, np.full(u.size, 3))
    assert abs(draws.mean() - 0.5) < 0.002


@pytest.mark.parametrize("x", [0, 500, 900])
def test_sample_distribution_chi_square(x):
    N, c = 1000, 2.0
    k = er_kernel(N, c)
    u = 1.0 - run_rng(7, x).random(10**5)
    draws = k.quantile(u, np.full(u.size, x))
    kmax = 8
    obs = np.bincount(np.minimum(draws, kmax), minlength=kmax + 1)
    probs = k.pmf(np.arange(kmax), x)
    probs = np.append(probs, 1.0 - probs.sum())
    p = sps.chisquare(obs, probs * u.size).pvalue
    assert p > 1e-3


def test_large_mean_quantile_uses_exact_binomial():
    k = er_kernel(400, 100.0)
    u = np.array([0.1, 0.5, 0.9, 1.0])
    np.testing.assert_array_equal(k.quantile(u, np.zeros(4, dtype=int)),
                                  sps.binom.ppf(u, 399, 0.25).astype(int))


@given(st.floats(min_value=1e-12, max_value=1.0), st.integers(0, 199))
@settings(max_examples=200, deadline=None)
def test_inversion_is_generalized_inverse(u, x):
    k = er_kernel(200, 3.0)
    q = int(k.quantile(np.array([u]), np.array([x]))[0])
    cdf = np.cumsum(k.pmf_row(x))
    assert 0 <= q <= 200 - x - 1
    assert cdf[q] >= u - 1e-12
    if q > 0:
        assert cdf[q - 1] < u + 1e-12


def test_tabular_degenerate():
    k = deterministic_kernel(20)
    x = np.arange(20)
    assert np.all(k.gamma_N(x) == 0) and np.all(k.psi_N(x) == 0)
    assert k.delta_N == 0


def test_tabular_matches_er():
    N, c = 50, 1.0
    er = er_kernel(N, c)
    table = {(j, x): binom_pmf(j, N - x - 1, c / N) for x in range(N) for j in range(N - x)}
    tab = tabular_kernel(N, table, Limits.polynomial([c, -c], [c, -c]))
    x = np.arange(N)
    np.testing.assert_allclose(tab.gamma_N(x), er.gamma_N(x), atol=1e-10)
    np.testing.assert_allclose(tab.psi_N(x), er.psi_N(x), atol=1e-10)
    assert tab.delta_N == pytest.approx(er.delta_N, abs=1e-10)
    for xx in (0, 17, 49):
        assert abs(tab.pmf_row(xx).sum() - 1.0) <= 1e-12


def test_tabular_bucket_rows_cover_ranges():
    k = tabular_kernel(10, {(0, 0): 0.25, (2, 0): 0.75, (0, 5): 1.0}, Limits.polynomial([1.0], [0.0]))
    assert k.gamma_N(4) == pytest.approx(1.5)
    assert k.gamma_N(5) == 0.0
    assert k.pmf(2, 3) == pytest.approx(0.75)


def test_tabular_row_sum_error():
    with pytest.raises(MalformedTableError):
        tabular_kernel(10, {(0, 0): 0.99}, Limits.polynomial([0.0], [0.0]))


def test_tabular_negative_mass_error():
    with pytest.raises(MalformedTableError):
        tabular_kernel(10, {(0, 0): 1.1, (1, 0): -0.1}, Limits.polynomial([0.0], [0.0]))


def test_tabular_support_violation():
    # bucket 0 spans x = 0..9, and at x = 9 no neighbor can remain
    with pytest.raises(MalformedTableError):
        tabular_kernel(10, {(0, 0): 0.5, (1, 0): 0.5}, Limits.polynomial([0.0], [0.0]))


def test_complete_graph_kernel_support():
    k = complete_graph_kernel(3)
    assert k.pmf(2, 0) == 1.0 and k.pmf(1, 1) == 1.0 and k.pmf(0, 2) == 1.0
