"""Norms, the error bound curve, sweep drivers, and threshold detection."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarz_coupling import (
    ConstantForcing,
    CouplingConfig,
    ErrorReport,
    Field2D,
    GaussianSine,
    SweepRow,
    bound_rhs,
    build_rectangle,
    calibrate_M,
    delta_factor,
    detect_threshold,
    h1_error,
    h1_norm,
    l2_error,
    l2_norm,
    lambda_opt,
    linf_error,
    linf_norm,
    rebuild_with_height,
    slice_to_omega2,
    split_at_interface,
    sweep_epsilon,
    sweep_interface,
    sweep_lambda,
)

# sqrt(integral of x^2 + 1 over (0,2) x (0,1)) to 19 digits
H1_NORM_OF_X = 2.160246899469286743655
# 0.025 * sqrt(1 + 81)
BOUND_EXAMPLE = 0.2263846284534354156643


def _field(expr, L=2.0, H=1.0, nx=40, nz=20):
    dom = build_rectangle(L, H, nx, nz)
    return Field2D.from_function(dom, expr)


def test_h1_norm_of_linear_field_matches_quadrature():
    vals = [h1_norm(_field(lambda x, z: x, nx=n, nz=n // 2)) for n in (20, 40, 80)]
    errs = [abs(v - H1_NORM_OF_X) for v in vals]
    assert errs[-1] < 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_norms_of_constant_field():
    f = _field(lambda x, z: 0 * x + 3.0)
    area = 2.0
    assert l2_norm(f) == pytest.approx(3.0 * np.sqrt(area), rel=1e-12)
    assert h1_norm(f) == pytest.approx(3.0 * np.sqrt(area), rel=1e-12)
    assert linf_norm(f) == pytest.approx(3.0)


def test_errors_vanish_for_identical_fields():
    f = _field(lambda x, z: np.sin(x) * z)
    for fn in (h1_error, l2_error, linf_error):
        err = fn(f, f)
        assert err.value == 0.0
        assert not err.absolute


def test_zero_reference_flags_absolute_norm():
    ref = _field(lambda x, z: 0 * x)
    u = _field(lambda x, z: 0 * x + 2.0)
    err = l2_error(ref, u)
    assert err.absolute
    assert err.value == pytest.approx(2.0 * np.sqrt(2.0), rel=1e-12)


def test_error_requires_matching_layout():
    a = _field(lambda x, z: x, nx=40, nz=20)
    b = _field(lambda x, z: x, nx=20, nz=10)
    with pytest.raises(ValueError):
        h1_error(a, b)


@given(
    seed=st.integers(0, 2**31 - 1),
    scale=st.floats(0.1, 5.0),
)
def test_h1_triangle_inequality(seed, scale):
    rng = np.random.default_rng(seed)
    dom = build_rectangle(1.0, 0.5, 8, 4)
    a, b = (
        Field2D(domain=dom, values=scale * rng.standard_normal((9, 5))) for _ in range(2)
    )
    apb = Field2D(domain=dom, values=a.values + b.values)
    assert h1_norm(apb) <= h1_norm(a) + h1_norm(b) + 1e-12


def test_delta_factor():
    assert delta_factor(17.0, 16.0) == pytest.approx(17.0)
    assert delta_factor(17.0, 0.0) == pytest.approx(1.0)
    assert delta_factor(17.0, 17.0) == np.inf
    assert delta_factor(17.0, 18.0) == np.inf


def test_bound_rhs_values():
    assert bound_rhs(0.1, 1.0, 2.0) == pytest.approx(0.2 * np.sqrt(2.0), rel=1e-14)
    assert bound_rhs(0.025, 9.0, 1.0) == pytest.approx(BOUND_EXAMPLE, rel=1e-14)
    assert bound_rhs(0.025, np.inf, 1.0) == np.inf
    with pytest.raises(ValueError):
        bound_rhs(0.025, 0.5, 1.0)


def _row(l0, err, delta=2.0, eps=0.03, status="ok"):
    return SweepRow(
        sweep_value=l0,
        rel_h1_error=err,
        rel_l2_error=err,
        rel_linf_error=err,
        bound_rhs=float("nan"),
        delta=delta,
        epsilon=0.025,
        epsilon_bound=eps,
        iterations=3,
        lam=0.07,
        status=status,
    )


def test_calibrate_anchors_at_smallest_sweep_value():
    rows = [_row(8.0, 2e-6, delta=17 / 9), _row(12.0, 4e-6, delta=17 / 5)]
    rep = ErrorReport(sweep_param="L0", rows=rows, kappa=0.001, tol=1e-8, L1=17.0)
    m = calibrate_M(rep)
    assert m == pytest.approx(2e-6 / (0.03 * np.sqrt(1 + (17 / 9) ** 2)), rel=1e-12)
    # anchored bound reproduces the anchor row error exactly
    assert bound_rhs(0.03, 17 / 9, m) == pytest.approx(2e-6, rel=1e-12)


def test_calibrate_skips_rows_out_of_validity():
    rows = [
        _row(18.0, 1e-2, delta=float("inf")),
        _row(12.0, 4e-6, delta=17 / 5),
    ]
    rep = ErrorReport(sweep_param="L0", rows=rows, kappa=0.001, tol=1e-8, L1=17.0)
    m = calibrate_M(rep)
    assert m == pytest.approx(4e-6 / (0.03 * np.sqrt(1 + (17 / 5) ** 2)), rel=1e-12)


def test_calibrate_needs_a_usable_row():
    rows = [_row(18.0, 1e-2, delta=float("inf"))]
    rep = ErrorReport(sweep_param="L0", rows=rows, kappa=0.001, tol=1e-8, L1=17.0)
    with pytest.raises(ValueError):
        calibrate_M(rep)


def test_detect_threshold_flat_curve_returns_none():
    rows = [_row(v, 1e-6 * (1 + 0.1 * i)) for i, v in enumerate((8.0, 10.0, 12.0, 14.0))]
    rep = ErrorReport(sweep_param="L0", rows=rows, kappa=0.001, tol=1e-8)
    assert detect_threshold(rep) is None


def test_detect_threshold_finds_first_jump():
    errs = [1e-6, 1.2e-6, 1.1e-6, 9e-5, 3e-3]
    rows = [_row(v, e) for v, e in zip((8.0, 10.0, 12.0, 16.0, 18.0), errs)]
    rep = ErrorReport(sweep_param="L0", rows=rows, kappa=0.001, tol=1e-8)
    assert detect_threshold(rep) == pytest.approx(16.0)
    # a stricter jump factor pushes the detection further out, then off the end
    assert detect_threshold(rep, jump_factor=100.0) == pytest.approx(18.0)
    assert detect_threshold(rep, jump_factor=1e4) is None


def test_detect_threshold_needs_three_rows():
    rows = [_row(8.0, 1e-6), _row(18.0, 1e-2)]
    rep = ErrorReport(sweep_param="L0", rows=rows, kappa=0.001, tol=1e-8)
    assert detect_threshold(rep) is None


@pytest.fixture(scope="module")
def small_rect_base():
    dom = build_rectangle(20.0, 0.5, 100, 5)
    split = split_at_interface(dom, 16.0)
    return CouplingConfig(
        split=split,
        kappa=0.001,
        lam=lambda_opt(0.001, 0.5, 16.0),
        forcing=GaussianSine(1.0, 19.0),
        tol=1e-8,
        max_iter=60,
    )


def test_interface_sweep_report_structure(small_rect_base):
    rep = sweep_interface(small_rect_base, (8.0, 12.0, 16.0, 18.0), L1=17.0)
    assert [r.sweep_value for r in rep.rows] == [8.0, 12.0, 16.0, 18.0]
    assert all(r.status == "ok" for r in rep.rows)
    assert rep.m_const is not None and rep.m_const > 0
    assert rep.rows[0].bound_rhs == pytest.approx(rep.rows[0].rel_h1_error, rel=1e-12)
    assert rep.rows[-1].bound_rhs == np.inf  # out of validity, delta = inf
    # per-row lambda defaults to the per-L0 optimum
    assert rep.rows[1].lam == pytest.approx(lambda_opt(0.001, 0.5, 12.0), rel=1e-12)


def test_interface_sweep_is_parallel_safe(small_rect_base):
    serial = sweep_interface(small_rect_base, (8.0, 12.0, 16.0), L1=17.0, jobs=1)
    parallel = sweep_interface(small_rect_base, (8.0, 12.0, 16.0), L1=17.0, jobs=3)
    for a, b in zip(serial.rows, parallel.rows):
        assert a.rel_h1_error == b.rel_h1_error
        assert a.iterations == b.iterations


def test_interface_sweep_records_failures_and_continues(small_rect_base):
    base = dataclasses.replace(small_rect_base, max_iter=2, lam=0.02)
    rep = sweep_interface(base, (8.0, 12.0), lam=0.02, L1=17.0)
    # exhausted runs keep their best-effort error but are excluded from
    # calibration through ok_rows
    assert all(r.status == "max_iter" for r in rep.rows)
    assert all(np.isfinite(r.rel_h1_error) for r in rep.rows)
    assert rep.ok_rows() == []


def test_interface_sweep_row_failure_is_isolated(small_rect_base):
    # 9.99 is off the hx = 0.2 grid: that row fails, the others survive
    rep = sweep_interface(small_rect_base, (8.0, 9.99), L1=17.0)
    by_value = {r.sweep_value: r for r in rep.rows}
    assert by_value[8.0].status == "ok"
    assert by_value[9.99].status.startswith("failed: ValueError")
    assert np.isnan(by_value[9.99].rel_h1_error)


def test_epsilon_sweep_tracks_height(small_rect_base):
    base = dataclasses.replace(small_rect_base, kappa=0.01)
    rep = sweep_epsilon(base, (0.025, 0.05), L1=17.0)
    assert [r.sweep_value for r in rep.rows] == [0.025, 0.05]
    assert all(r.status == "ok" for r in rep.rows)
    # the sweep value is H / L with L fixed at 20
    assert rep.rows[0].epsilon == pytest.approx(0.025)
    assert rep.rows[1].rel_h1_error >= rep.rows[0].rel_h1_error * 0.95


def test_lambda_sweep_includes_optimum(small_rect_base):
    lam0 = small_rect_base.lam
    entries = sweep_lambda(small_rect_base, [4.0 * lam0, 0.25 * lam0])
    lams = [e.lam for e in entries]
    assert lams == sorted(lams)
    assert any(np.isclose(v, lam0, rtol=1e-12) for v in lams)
    assert all(e.status == "ok" for e in entries)
    assert all(e.trace.diff2 for e in entries)


def test_lambda_sweep_rejects_nonpositive(small_rect_base):
    with pytest.raises(ValueError):
        sweep_lambda(small_rect_base, [0.0])


def test_slice_to_omega2_matches_split(small_rect_base):
    split = small_rect_base.split
    full = Field2D.from_function(split.full, lambda x, z: x + z)
    part = slice_to_omega2(full, split)
    assert part.values.shape == (split.omega2.grid.nx + 1, split.omega2.grid.nz + 1)
    assert part.values[0, 0] == pytest.approx(16.0)


def test_rebuild_with_height_scales_grid():
    dom = build_rectangle(20.0, 0.5, 100, 5)
    taller = rebuild_with_height(dom, 1.0)
    assert taller.shallow_height == pytest.approx(1.0)
    assert taller.grid.nx == 100 and taller.grid.nz == 5
    assert taller.grid.hz == pytest.approx(0.2)
