"""Reduced 1-D solver against closed forms and structural properties."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarz_coupling import (
    Field1D,
    GaussianSine,
    Reduced1DProblem,
    analytic_error_mode,
    average_forcing,
    build_rectangle,
    forcing_field,
    solve_1d,
    split_at_interface,
)
from schwarz_coupling.geometry import Grid1D

# closed form for -u'' + u = 0 on (0, 0.7), u(0) = 0.4, u'(L) + 2 u(L) = 3,
# and for the constant-forcing variant -u'' + u = 1.5 (50-digit evaluation)
HOMOG_U_AT_L = 0.965161044861994924892
HOMOG_U_MID = 0.642805142095852821424
FORCED_U_AT_L = 1.103222755973625754656
FORCED_U_MID = 0.7952215325412574486825


def _grid(n):
    return Grid1D(n=n, hx=0.7 / n)


def _solve(n, forcing_value):
    grid = _grid(n)
    problem = Reduced1DProblem(
        a2=1.0,
        forcing=Field1D.on(grid, forcing_value),
        left_dirichlet=0.4,
        robin_lambda=2.0,
        robin_g=3.0,
    )
    return solve_1d(problem)


@pytest.mark.parametrize(
    "forcing_value,expect_end,expect_mid",
    [(0.0, HOMOG_U_AT_L, HOMOG_U_MID), (1.5, FORCED_U_AT_L, FORCED_U_MID)],
)
def test_matches_closed_form(forcing_value, expect_end, expect_mid):
    u = _solve(280, forcing_value)
    h2 = u.hx**2
    assert abs(u.values[-1] - expect_end) < 2.0 * h2
    assert abs(u.values[140] - expect_mid) < 2.0 * h2


def test_second_order_convergence():
    errs = []
    for n in (20, 40, 80):
        u = _solve(n, 1.5)
        errs.append(abs(u.values[-1] - FORCED_U_AT_L))
    assert errs[0] / errs[1] >= 3.8
    assert errs[1] / errs[2] >= 3.8


def test_dirichlet_end_is_exact():
    u = _solve(40, 1.5)
    assert u.values[0] == 0.4


@given(
    c1=st.floats(-3, 3),
    c2=st.floats(-3, 3),
    data=st.floats(-2, 2),
)
def test_linearity_in_data(c1, c2, data):
    grid = _grid(24)
    base = dict(a2=0.5, robin_lambda=1.5)
    ua = solve_1d(
        Reduced1DProblem(
            forcing=Field1D.on(grid, 1.0), left_dirichlet=0.2, robin_g=data, **base
        )
    )
    ub = solve_1d(
        Reduced1DProblem(
            forcing=Field1D.on(grid, -0.3), left_dirichlet=1.0, robin_g=0.7, **base
        )
    )
    uc = solve_1d(
        Reduced1DProblem(
            forcing=Field1D.on(grid, c1 * 1.0 + c2 * (-0.3)),
            left_dirichlet=c1 * 0.2 + c2 * 1.0,
            robin_g=c1 * data + c2 * 0.7,
            **base,
        )
    )
    combo = c1 * ua.values + c2 * ub.values
    assert np.max(np.abs(combo - uc.values)) < 1e-9 * (1 + np.max(np.abs(combo)))


@given(
    forcing=st.floats(0, 5),
    gamma=st.floats(0, 3),
    g=st.floats(0, 3),
    lam=st.floats(0.05, 10),
)
def test_nonnegative_data_gives_nonnegative_solution(forcing, gamma, g, lam):
    grid = _grid(16)
    u = solve_1d(
        Reduced1DProblem(
            a2=0.8,
            forcing=Field1D.on(grid, forcing),
            left_dirichlet=gamma,
            robin_lambda=lam,
            robin_g=g,
        )
    )
    assert u.values.min() >= -1e-12


def test_problem_validation():
    grid = _grid(8)
    f = Field1D.on(grid, 0.0)
    with pytest.raises(ValueError, match="a2"):
        Reduced1DProblem(a2=-1.0, forcing=f, left_dirichlet=0, robin_lambda=1, robin_g=0)
    with pytest.raises(ValueError, match="robin_lambda"):
        Reduced1DProblem(a2=0.0, forcing=f, left_dirichlet=0, robin_lambda=0.0, robin_g=0)


def test_field1d_validation():
    with pytest.raises(ValueError, match="3 nodes"):
        Field1D(x=np.array([0.0, 1.0]), values=np.array([0.0, 1.0]))
    with pytest.raises(ValueError, match="shape"):
        Field1D(x=np.linspace(0, 1, 4), values=np.zeros(5))
    with pytest.raises(ValueError, match="finite"):
        Field1D(x=np.linspace(0, 1, 4), values=np.array([0.0, np.nan, 0.0, 0.0]))


def test_average_forcing_is_exact_for_linear_profiles():
    # trapezoid rule integrates z-linear data exactly: average = value at H/2
    dom = build_rectangle(2.0, 0.5, 8, 4)
    split = split_at_interface(dom, 1.0)
    xx, zz = dom.grid.nodes()
    from schwarz_coupling import Field2D

    f = Field2D(domain=dom, values=3.0 * zz + 1.0)
    avg = average_forcing(f, split)
    assert np.allclose(avg.values, 3.0 * 0.25 + 1.0, atol=1e-14)
    assert avg.x[-1] == pytest.approx(1.0)


def test_average_forcing_kills_full_period_sine():
    dom = build_rectangle(20.0, 0.5, 100, 10)
    split = split_at_interface(dom, 16.0)
    avg = average_forcing(forcing_field(dom, GaussianSine(m=1.0, x_star=19.0)), split)
    assert np.max(np.abs(avg.values)) < 1e-15


def test_analytic_error_mode_shape():
    x = np.linspace(0, 2, 5)
    vals = analytic_error_mode(2.0, 0.5, x)
    assert np.allclose(vals, 2.0 * np.sinh(0.5 * x))
