import math

import numpy as np
import pytest

from rsalimits.errors import InvalidParameterError, NoHittingError
from rsalimits.fluid import er_closed_form, er_rho, hitting_time_fluid, solve_fluid
from rsalimits.kernel import deterministic_kernel, er_kernel


def test_unit_drift():
    sol = solve_fluid(lambda z: 0.0 * z)
    np.testing.assert_allclose(sol.z, sol.t, atol=1e-12)
    assert sol.T_star == pytest.approx(1.0, abs=1e-12)
    assert hitting_time_fluid(sol) == pytest.approx(1.0, abs=1e-12)


def test_kernel_argument_uses_gamma():
    sol = solve_fluid(deterministic_kernel(10))
    assert sol.T_star == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.0])
def test_er_against_closed_form(c):
    sol = solve_fluid(er_kernel(10_000, c), dt=1e-3)
    rho = (1 + c) / c
    exact = rho * (1 - np.exp(-c * sol.t))
    assert np.max(np.abs(sol.z - exact)) < 1e-8
    assert abs(sol.T_star - math.log(1 + c) / c) < 1e-8
    assert abs(sol(sol.T_star) - 1.0) < 1e-10


def test_hitting_time_values():
    assert solve_fluid(er_kernel(100, 1.0)).T_star == pytest.approx(math.log(2), abs=1e-8)
    assert solve_fluid(er_kernel(100, 2.0)).T_star == pytest.approx(0.549306, abs=1e-6)
    assert hitting_time_fluid(er_closed_form(2.0)) == pytest.approx(math.log(3) / 2, abs=1e-12)


def test_grid_extent():
    sol = solve_fluid(er_kernel(100, 1.0), dt=1e-3)
    first = np.flatnonzero(sol.z >= 1.0)[0]
    assert len(sol.t) == first + 2
    assert sol.z[0] == 0.0
    assert np.all(np.diff(sol.z) > 0)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_rk4_order(c):
    errs = []
    for dt in (1e-2, 5e-3):
        sol = solve_fluid(er_kernel(1000, c), dt=dt)
        errs.append(np.max(np.abs(sol.z - er_closed_form(c)(sol.t))))
    assert errs[0] / errs[1] >= 14.0


def test_closed_form_values():
    cf = er_closed_form(1.0)
    assert cf(math.log(2)) == pytest.approx(1.0, abs=1e-15)
    assert er_rho(1.0) == 2.0
    assert cf.provenance == "closed_form"
    Ts = [er_closed_form(c).T_star for c in (1, 10, 100)]
    assert Ts[0] > Ts[1] > Ts[2] > 0


def test_T_star_decreasing_in_c():
    Ts = [solve_fluid(er_kernel(1000, c)).T_star for c in (0.25, 0.5, 1, 2, 4)]
    assert all(a > b for a, b in zip(Ts, Ts[1:]))


def test_no_hitting_is_flagged():
    with pytest.raises(NoHittingError):
        solve_fluid(lambda z: 0.0 * z, t_max=0.5)


def test_rejects_coarse_step():
    with pytest.raises(InvalidParameterError):
        solve_fluid(lambda z: 0.0 * z, dt=0.1)


def test_interpolant_between_nodes():
    sol = solve_fluid(er_kernel(1000, 1.0), dt=1e-2)
    t = np.linspace(0, sol.t[-1], 777)
    assert np.max(np.abs(sol(t) - 2 * (1 - np.exp(-t)))) < 1e-8


def test_stopped_path():
    sol = solve_fluid(er_kernel(1000, 1.0))
    assert sol.stopped(0.9) == 1.0
    assert sol.stopped(0.5) == pytest.approx(2 * (1 - math.exp(-0.5)), abs=1e-10)
