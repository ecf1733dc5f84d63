"""Error measurement and validity studies for the coupled solver.

Provides discrete H1/L2/Linf errors between coupled and reference solutions,
the model-reduction error bound M * eps * sqrt(1 + delta^2) with its
single-point calibration, sweeps over the interface location, the aspect
ratio eps = H/L and the Robin parameter, and a heuristic detector for the
abscissa where the reduced model stops being valid.

delta = L1/(L1 - L0) measures how close the interface sits to the validity
limit L1 (a configuration input: the forcing support boundary is generally
unknown).  eps appears twice on purpose: sweeps report H/L (total length),
the bound uses H/L1.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .elliptic2d import Field2D, LinearSolveError, solve_reference
from .forcing import forcing_field
from .geometry import Domain2D, DomainSplit, Rectangle, build_funnel, build_rectangle, split_at_interface
from .schwarz import (
    CouplingConfig,
    IterationTrace,
    SchwarzNonConvergenceError,
    lambda_opt,
    schwarz_solve,
)

__all__ = [
    "RelativeError",
    "h1_norm",
    "l2_norm",
    "linf_norm",
    "h1_error",
    "l2_error",
    "linf_error",
    "slice_to_omega2",
    "delta_factor",
    "bound_rhs",
    "SweepRow",
    "ErrorReport",
    "calibrate_M",
    "sweep_interface",
    "sweep_epsilon",
    "LambdaTraceEntry",
    "sweep_lambda",
    "detect_threshold",
    "rebuild_with_height",
]


class RelativeError(NamedTuple):
    """A relative error, or the absolute one when the reference norm is zero."""

    value: float
    absolute: bool


def _block_integral(values: np.ndarray, domain: Domain2D, with_gradient: bool) -> float:
    """Integral of v^2 (plus |grad v|^2 when asked) over the block union."""
    hx, hz = domain.grid.hx, domain.grid.hz
    total = 0.0
    for (i0, i1, j0, j1) in domain.blocks:
        v = values[i0 : i1 + 1, j0 : j1 + 1]
        integrand = v * v
        if with_gradient:
            eo = 2 if min(v.shape) >= 3 else 1
            gx, gz = np.gradient(v, hx, hz, edge_order=eo)
            integrand = integrand + gx * gx + gz * gz
        total += float(np.trapezoid(np.trapezoid(integrand, dx=hz, axis=1), dx=hx))
    return total


def h1_norm(u: Field2D) -> float:
    """Discrete H1 norm: trapezoidal L2 of values and of the difference
    gradient (central in the interior, one-sided at block edges)."""
    return math.sqrt(_block_integral(u.values, u.domain, with_gradient=True))


def l2_norm(u: Field2D) -> float:
    return math.sqrt(_block_integral(u.values, u.domain, with_gradient=False))


def linf_norm(u: Field2D) -> float:
    act = u.domain.grid.active
    return float(np.max(np.abs(u.values[act])))


def _check_same_layout(u_ref: Field2D, u2: Field2D) -> None:
    ga, gb = u_ref.domain.grid, u2.domain.grid
    if ga.shape != gb.shape or not np.array_equal(ga.active, gb.active):
        raise ValueError("fields live on different grids")
    if not (math.isclose(ga.hx, gb.hx) and math.isclose(ga.hz, gb.hz) and math.isclose(ga.x0, gb.x0)):
        raise ValueError("fields live on differently spaced or shifted grids")


def _relative(num: float, den: float) -> RelativeError:
    if den == 0.0:
        return RelativeError(num, absolute=True)
    return RelativeError(num / den, absolute=False)


def h1_error(u_ref: Field2D, u2: Field2D) -> RelativeError:
    """H1 error of u2 against u_ref on their common domain, relative to
    the H1 norm of u_ref (absolute and flagged when that norm vanishes)."""
    _check_same_layout(u_ref, u2)
    diff = Field2D(domain=u_ref.domain, values=u2.values - u_ref.values)
    return _relative(h1_norm(diff), h1_norm(u_ref))


def l2_error(u_ref: Field2D, u2: Field2D) -> RelativeError:
    _check_same_layout(u_ref, u2)
    diff = Field2D(domain=u_ref.domain, values=u2.values - u_ref.values)
    return _relative(l2_norm(diff), l2_norm(u_ref))


def linf_error(u_ref: Field2D, u2: Field2D) -> RelativeError:
    _check_same_layout(u_ref, u2)
    diff = Field2D(domain=u_ref.domain, values=u2.values - u_ref.values)
    return _relative(linf_norm(diff), linf_norm(u_ref))


def slice_to_omega2(full_field: Field2D, split: DomainSplit) -> Field2D:
    """Restrict a field on the full domain to the 2-D side of the split."""
    if full_field.domain.grid.shape != split.full.grid.shape:
        raise ValueError("field is not defined on the split's full domain")
    return Field2D(domain=split.omega2, values=full_field.values[split.interface_index :, :].copy())


def delta_factor(L1: float, L0: float) -> float:
    """delta = L1/(L1 - L0); infinite at or beyond the validity limit."""
    if not L1 > 0.0:
        raise ValueError(f"need L1 > 0, got {L1}")
    if L0 < 0.0:
        raise ValueError(f"need L0 >= 0, got {L0}")
    if L0 >= L1:
        return math.inf
    return L1 / (L1 - L0)


def bound_rhs(epsilon: float, delta: float, m_const: float) -> float:
    """Model-reduction error bound M * eps * sqrt(1 + delta^2).

    An infinite delta (interface at or past the validity limit) yields the
    out-of-validity sentinel inf."""
    if not m_const > 0.0:
        raise ValueError(f"need M > 0, got {m_const}")
    if not epsilon > 0.0:
        raise ValueError(f"need epsilon > 0, got {epsilon}")
    if math.isinf(delta):
        return math.inf
    if not delta >= 1.0:
        raise ValueError(f"need delta >= 1 (interface before the validity limit), got {delta}")
    return m_const * epsilon * math.sqrt(1.0 + delta * delta)


@dataclass
class SweepRow:
    """One sweep sample.  Failed runs keep their row: errors are nan and
    status carries the reason.  bound_rhs/delta/epsilon_bound are nan when
    no validity limit L1 is configured; delta and the bound are inf past it."""

    sweep_value: float
    rel_h1_error: float
    rel_l2_error: float
    rel_linf_error: float
    bound_rhs: float
    delta: float
    epsilon: float
    epsilon_bound: float
    iterations: int
    lam: float
    status: str


@dataclass
class ErrorReport:
    """Sweep result: rows sorted by sweep value plus the run metadata needed
    to reproduce them."""

    sweep_param: str
    rows: list[SweepRow]
    kappa: float
    tol: float
    grid: dict[str, float] = field(default_factory=dict)
    L1: float | None = None
    m_const: float | None = None

    COLUMNS = (
        "sweep_param",
        "sweep_value",
        "rel_h1_error",
        "rel_l2_error",
        "rel_linf_error",
        "bound_rhs",
        "delta",
        "epsilon",
        "epsilon_bound",
        "iterations",
        "lambda",
        "status",
    )

    def ok_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.status.startswith("ok")]


def calibrate_M(report: ErrorReport) -> float:
    """Anchor the bound at the smallest swept value inside the validity
    region: M = error / (eps_bound * sqrt(1 + delta^2)) there, so the bound
    curve touches the measured curve at its left end."""
    for row in report.rows:
        if (
            row.status.startswith("ok")
            and math.isfinite(row.delta)
            and row.epsilon_bound > 0.0
            and math.isfinite(row.rel_h1_error)
            and row.rel_h1_error > 0.0
        ):
            return row.rel_h1_error / (row.epsilon_bound * math.sqrt(1.0 + row.delta * row.delta))
    raise ValueError("no successful sweep row inside the validity region to calibrate against")


def _finish_report(report: ErrorReport) -> ErrorReport:
    """Sort rows and, when a validity limit is set, calibrate and fill the
    bound column."""
    report.rows.sort(key=lambda r: r.sweep_value)
    if report.L1 is not None:
        try:
            report.m_const = calibrate_M(report)
        except ValueError:
            report.m_const = None
        if report.m_const is not None:
            for row in report.rows:
                if math.isnan(row.delta):
                    continue
                row.bound_rhs = bound_rhs(row.epsilon_bound, row.delta, report.m_const)
    return report


def _error_columns(ref_on_omega2: Field2D, u2: Field2D) -> tuple[float, float, float, bool]:
    e_h1 = h1_error(ref_on_omega2, u2)
    e_l2 = l2_error(ref_on_omega2, u2)
    e_li = linf_error(ref_on_omega2, u2)
    return e_h1.value, e_l2.value, e_li.value, e_h1.absolute


def _interface_row(task: tuple) -> SweepRow:
    base, ref, l0, lam_fixed, L1 = task
    full = base.split.full
    total_len = full.grid.nx * full.grid.hx
    height = full.shallow_height
    eps = height / total_len
    eps_b = height / L1 if L1 is not None else math.nan
    delta = delta_factor(L1, l0) if L1 is not None else math.nan
    lam = math.nan
    try:
        split = split_at_interface(full, l0)
        lam = lam_fixed if lam_fixed is not None else lambda_opt(base.kappa, height, l0)
        cfg = replace(base, split=split, lam=lam)
        status = "ok"
        try:
            sol = schwarz_solve(cfg)
        except SchwarzNonConvergenceError as err:
            sol, status = err.solution, "max_iter"
        e1, e2, ei, is_abs = _error_columns(slice_to_omega2(ref, split), sol.u2)
        if is_abs:
            status += " (absolute error)"
        return SweepRow(l0, e1, e2, ei, math.nan, delta, eps, eps_b, sol.trace.iterations, lam, status)
    except (ValueError, LinearSolveError) as err:
        msg = f"failed: {type(err).__name__}: {err}"
        return SweepRow(l0, math.nan, math.nan, math.nan, math.nan, delta, eps, eps_b, 0, lam, msg)


def _run_rows(worker, tasks: list[tuple], jobs: int) -> list[SweepRow]:
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(worker, tasks))


def _grid_meta(domain: Domain2D) -> dict[str, float]:
    g = domain.grid
    return {"nx": g.nx, "nz": g.nz, "hx": g.hx, "hz": g.hz}


def sweep_interface(
    base: CouplingConfig,
    l0_values: Sequence[float],
    lam: float | None = None,
    L1: float | None = None,
    jobs: int = 1,
) -> ErrorReport:
    """Coupled-vs-reference errors as a function of the interface abscissa.

    The reference is solved once on the full domain.  lam=None selects the
    per-location optimal Robin parameter; failures (off-grid L0, solver
    breakdown, max_iter) are captured per row and the sweep continues.
    """
    if len(l0_values) == 0:
        raise ValueError("empty interface sweep")
    full = base.split.full
    ref = solve_reference(full, forcing_field(full, base.forcing), base.gamma1, base.gamma2, base.kappa)
    tasks = [(base, ref, float(l0), lam, L1) for l0 in l0_values]
    rows = _run_rows(_interface_row, tasks, jobs)
    report = ErrorReport(
        sweep_param="L0",
        rows=rows,
        kappa=base.kappa,
        tol=base.tol,
        grid=_grid_meta(full),
        L1=L1,
    )
    return _finish_report(report)


def rebuild_with_height(domain: Domain2D, new_height: float) -> Domain2D:
    """The same geometry with the shallow height changed to new_height.

    The shallow cell count is preserved (hz scales with the height, hx is
    untouched), so the vertical resolution relative to the height is fixed.
    """
    if not new_height > 0.0:
        raise ValueError(f"need a positive height, got {new_height}")
    g = domain.grid
    if isinstance(domain.shape, Rectangle):
        return build_rectangle(domain.shape.L, new_height, g.nx, g.nz)
    s = domain.shape
    hz_new = new_height / domain.shallow_top_index
    return build_funnel(s.channel_len, new_height, s.expansion_len, s.l, g.hx, hz_new)


def _epsilon_row(task: tuple) -> SweepRow:
    base, l0, eps, lam_fixed, L1 = task
    full0 = base.split.full
    total_len = full0.grid.nx * full0.grid.hx
    height = eps * total_len
    eps_b = height / L1 if L1 is not None else math.nan
    delta = delta_factor(L1, l0) if L1 is not None else math.nan
    lam = math.nan
    try:
        dom = rebuild_with_height(full0, height)
        ref = solve_reference(dom, forcing_field(dom, base.forcing), base.gamma1, base.gamma2, base.kappa)
        split = split_at_interface(dom, l0)
        lam = lam_fixed if lam_fixed is not None else lambda_opt(base.kappa, height, l0)
        cfg = replace(base, split=split, lam=lam)
        status = "ok"
        try:
            sol = schwarz_solve(cfg)
        except SchwarzNonConvergenceError as err:
            sol, status = err.solution, "max_iter"
        e1, e2, ei, is_abs = _error_columns(slice_to_omega2(ref, split), sol.u2)
        if is_abs:
            status += " (absolute error)"
        return SweepRow(eps, e1, e2, ei, math.nan, delta, eps, eps_b, sol.trace.iterations, lam, status)
    except (ValueError, LinearSolveError) as err:
        msg = f"failed: {type(err).__name__}: {err}"
        return SweepRow(eps, math.nan, math.nan, math.nan, math.nan, delta, eps, eps_b, 0, lam, msg)


def sweep_epsilon(
    base: CouplingConfig,
    epsilon_values: Sequence[float],
    lam: float | None = None,
    L1: float | None = None,
    jobs: int = 1,
) -> ErrorReport:
    """Coupled-vs-reference errors as the aspect ratio eps = H/L varies.

    The interface stays at base.split.L0; the domain is rebuilt per eps with
    H = eps*L and a fixed shallow cell count, and each row gets its own
    reference solve.  Geometry that does not snap to the spacings fails that
    row only.
    """
    if len(epsilon_values) == 0:
        raise ValueError("empty aspect-ratio sweep")
    l0 = base.split.L0
    tasks = [(base, l0, float(e), lam, L1) for e in epsilon_values]
    rows = _run_rows(_epsilon_row, tasks, jobs)
    report = ErrorReport(
        sweep_param="epsilon",
        rows=rows,
        kappa=base.kappa,
        tol=base.tol,
        grid=_grid_meta(base.split.full),
        L1=L1,
    )
    return _finish_report(report)


@dataclass
class LambdaTraceEntry:
    lam: float
    trace: IterationTrace
    status: str


def sweep_lambda(base: CouplingConfig, lambda_values: Sequence[float]) -> list[LambdaTraceEntry]:
    """Convergence traces for several Robin parameters at a fixed interface.

    The optimal value is always included; non-positive values are rejected.
    A run that exhausts max_iter still contributes its trace.
    """
    vals = [float(v) for v in lambda_values]
    if any(v <= 0.0 for v in vals):
        raise ValueError("Robin parameter sweep values must be positive")
    lam_ref = lambda_opt(base.kappa, base.H, base.split.L0)
    if not any(math.isclose(v, lam_ref, rel_tol=1e-12) for v in vals):
        vals.append(lam_ref)
    entries = []
    for lam in sorted(vals):
        cfg = replace(base, lam=lam)
        try:
            sol = schwarz_solve(cfg)
            entries.append(LambdaTraceEntry(lam=lam, trace=sol.trace, status="ok"))
        except SchwarzNonConvergenceError as err:
            entries.append(LambdaTraceEntry(lam=lam, trace=err.trace, status="max_iter"))
    return entries


def detect_threshold(report: ErrorReport, jump_factor: float = 5.0) -> float | None:
    """Smallest sweep value whose error jumps above jump_factor times the
    median error of all smaller sweep values; None when there is no jump or
    fewer than three usable rows.

    On an interface sweep the returned abscissa estimates the validity limit
    of the reduced model (the errors grow sharply once the interface crosses
    into the region the 1-D model cannot represent)."""
    if not jump_factor > 0.0:
        raise ValueError(f"need jump_factor > 0, got {jump_factor}")
    usable = [
        (r.sweep_value, r.rel_h1_error)
        for r in sorted(report.rows, key=lambda r: r.sweep_value)
        if r.status.startswith("ok") and math.isfinite(r.rel_h1_error)
    ]
    if len(usable) < 3:
        return None
    errors = [e for _, e in usable]
    for i in range(1, len(usable)):
        if errors[i] > jump_factor * float(np.median(errors[:i])):
            return usable[i][0]
    return None
