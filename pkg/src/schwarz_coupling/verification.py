"""Built-in self checks: discretization orders on closed-form solutions,
two-iteration collapse at the optimal Robin parameter, contraction-rate
dominance, and interface-constraint residuals.

Runs on deliberately coarse grids so the whole suite stays fast; the checks
mirror the acceptance properties qualitatively (the coarse-grid two-iteration
ratio threshold is 1e-3 instead of the fine-grid 1e-6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import slice_to_omega2  # noqa: F401  (re-exported convenience)
from .elliptic2d import BoundarySpec, Dirichlet, Field2D, Neumann, RobinKappa, assemble
from .forcing import ConstantForcing, GaussianSine
from .geometry import Domain2D, Grid1D, Tag, build_funnel, build_rectangle, split_at_interface
from .reduced1d import Field1D, Reduced1DProblem, solve_1d
from .schwarz import (
    CoupledSolution,
    CouplingConfig,
    SchwarzNonConvergenceError,
    contraction_ratio,
    fitted_contraction_ratios,
    lambda_opt,
    schwarz_solve,
)

__all__ = ["CheckResult", "PASS", "FAIL", "SKIP", "run_verification", "MIN_SHALLOW_CELLS"]

PASS, FAIL, SKIP = "pass", "fail", "skip"

MIN_SHALLOW_CELLS = 4
ORDER_RATIO_MIN = 3.8
COARSE_TWO_ITER_MAX = 1e-3
RESIDUAL_MAX = 1e-7
RATE_SLACK = 0.05


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str

    @property
    def failed(self) -> bool:
        return self.status == FAIL


def _ratios(errors: list[float]) -> list[float]:
    return [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]


def _order_result(name: str, errors: list[float]) -> CheckResult:
    ratios = _ratios(errors)
    ok = all(r >= ORDER_RATIO_MIN for r in ratios)
    detail = "halving ratios " + ", ".join(f"{r:.2f}" for r in ratios) + f" (need >= {ORDER_RATIO_MIN})"
    return CheckResult(name, PASS if ok else FAIL, detail)


def _order_check_1d() -> CheckResult:
    # -u'' + u = (pi^2 + 1) cos(pi x) on (0, 1), u = cos(pi x)
    lam = 2.0
    errors = []
    for n in (16, 32, 64):
        grid = Grid1D(n=n, hx=1.0 / n)
        x = grid.x
        problem = Reduced1DProblem(
            a2=1.0,
            forcing=Field1D.on(grid, (math.pi**2 + 1.0) * np.cos(math.pi * x)),
            left_dirichlet=1.0,
            robin_lambda=lam,
            robin_g=-lam,
        )
        u = solve_1d(problem)
        errors.append(float(np.max(np.abs(u.values - np.cos(math.pi * x)))))
    return _order_result("order/reduced-1d", errors)


def _dirichlet_trace(domain: Domain2D, tag: Tag, exact: Callable) -> np.ndarray:
    nodes = domain.tag_nodes(tag)
    g = domain.grid
    return exact(g.x0 + g.hx * nodes[:, 0], g.z0 + g.hz * nodes[:, 1])


def _max_error(domain: Domain2D, u: Field2D, exact: Callable) -> float:
    xx, zz = domain.grid.nodes()
    act = domain.grid.active
    return float(np.max(np.abs(u.values[act] - exact(xx, zz)[act])))


def _order_check_rect() -> CheckResult:
    # u = cos(pi x / 2) cos(pi z) on (0, 2) x (0, 1): Neumann top, flat bottom
    def exact(x, z):
        return np.cos(0.5 * math.pi * x) * np.cos(math.pi * z)

    k2 = (0.5 * math.pi) ** 2 + math.pi**2
    errors = []
    for nz in (4, 8, 16):
        dom = build_rectangle(2.0, 1.0, 2 * nz, nz)
        bcs = BoundarySpec(
            left=Dirichlet(_dirichlet_trace(dom, Tag.LEFT, exact)),
            right=Dirichlet(_dirichlet_trace(dom, Tag.RIGHT, exact)),
            top=Neumann(),
            bottom=RobinKappa(0.0),
        )
        u = assemble(dom, Field2D.from_function(dom, lambda x, z: k2 * exact(x, z)), bcs).solve()
        errors.append(_max_error(dom, u, exact))
    return _order_result("order/full-2d-rect", errors)


def _order_check_funnel() -> CheckResult:
    # additive mode with zero normal derivative on every Neumann side,
    # including the expansion wall at x = 1: u = cos(pi x) + cos(4 pi z)
    def exact(x, z):
        return np.cos(math.pi * x) + np.cos(4.0 * math.pi * z)

    def forcing(x, z):
        return math.pi**2 * np.cos(math.pi * x) + (4.0 * math.pi) ** 2 * np.cos(4.0 * math.pi * z)

    errors = []
    for nz0 in (8, 16, 32):
        h = 0.5 / nz0
        dom = build_funnel(1.0, 0.5, 0.5, 1.0, hx=h, hz=h)
        bcs = BoundarySpec(
            left=Dirichlet(_dirichlet_trace(dom, Tag.LEFT, exact)),
            right=Dirichlet(_dirichlet_trace(dom, Tag.RIGHT, exact)),
            top=Neumann(),
            bottom=Neumann(),
        )
        u = assemble(dom, Field2D.from_function(dom, forcing), bcs).solve()
        errors.append(_max_error(dom, u, exact))
    return _order_result("order/full-2d-funnel", errors)


def _coarse_rect_case(lam: float | None, max_iter: int = 60) -> CoupledSolution:
    dom = build_rectangle(20.0, 0.5, 100, 5)
    split = split_at_interface(dom, 16.0)
    kappa = 0.001
    lam_v = lambda_opt(kappa, 0.5, 16.0) if lam is None else lam
    cfg = CouplingConfig(
        split=split, kappa=kappa, lam=lam_v, forcing=GaussianSine(), tol=1e-8, max_iter=max_iter
    )
    return schwarz_solve(cfg)


def _coarse_funnel_case() -> CoupledSolution:
    dom = build_funnel(2.0, 0.05, 1.0, 3.0, hx=0.1, hz=0.025)
    split = split_at_interface(dom, 1.5)
    kappa = 0.001
    lam_v = lambda_opt(kappa, 0.05, 1.5)
    cfg = CouplingConfig(
        split=split, kappa=kappa, lam=lam_v, forcing=ConstantForcing(1.0), tol=1e-8, max_iter=60
    )
    return schwarz_solve(cfg)


def _two_iteration_result(name: str, solution: CoupledSolution) -> CheckResult:
    t = solution.trace
    if t.iterations < 2 or t.diff2[0] == 0.0:
        return CheckResult(name, FAIL, "trace too short to measure the iteration-2 drop")
    ratio = t.diff2[1] / t.diff2[0]
    ok = ratio <= COARSE_TWO_ITER_MAX
    return CheckResult(
        name,
        PASS if ok else FAIL,
        f"diff2(2)/diff2(1) = {ratio:.3e} (need <= {COARSE_TWO_ITER_MAX:.0e}), "
        f"{t.iterations} iterations",
    )


def _contraction_result(cases: list[tuple[str, float, CoupledSolution]]) -> CheckResult:
    worst = -math.inf
    details = []
    for label, bound, sol in cases:
        floor = 10.0 * 1e-8
        excess = [r - (bound + RATE_SLACK) for r in fitted_contraction_ratios(sol.trace, floor)]
        gap = max(excess) if excess else -math.inf
        worst = max(worst, gap)
        details.append(f"{label}: bound {bound:.4f}, worst excess {gap:+.3f}")
    return CheckResult(
        "contraction/rate-dominance",
        PASS if worst <= 0.0 else FAIL,
        "; ".join(details),
    )


def _residual_result(solutions: list[tuple[str, CoupledSolution]]) -> CheckResult:
    worst = 0.0
    worst_label = "-"
    for label, sol in solutions:
        r = max(sol.trace.value_residual[-1], sol.trace.flux_residual[-1])
        if r > worst:
            worst, worst_label = r, label
    ok = worst <= RESIDUAL_MAX
    return CheckResult(
        "constraints/interface-residuals",
        PASS if ok else FAIL,
        f"max residual {worst:.3e} ({worst_label}; need <= {RESIDUAL_MAX:.0e})",
    )


def run_verification(shallow_cells: int | None = None) -> list[CheckResult]:
    """Run every built-in check and return one result per check.

    shallow_cells is the configured vertical cell count across the shallow
    height; below MIN_SHALLOW_CELLS the refinement studies are skipped (too
    few levels to measure an order) while the coupling checks still run.
    """
    results: list[CheckResult] = []

    if shallow_cells is not None and shallow_cells < MIN_SHALLOW_CELLS:
        reason = f"nz = {shallow_cells} < {MIN_SHALLOW_CELLS}: too coarse for a refinement study"
        for name in ("order/reduced-1d", "order/full-2d-rect", "order/full-2d-funnel"):
            results.append(CheckResult(name, SKIP, reason))
    else:
        results.append(_order_check_1d())
        results.append(_order_check_rect())
        results.append(_order_check_funnel())

    coupled: list[tuple[str, CoupledSolution]] = []
    try:
        rect_opt = _coarse_rect_case(lam=None)
        results.append(_two_iteration_result("two-iteration/rect", rect_opt))
        coupled.append(("rect lam_opt", rect_opt))
    except SchwarzNonConvergenceError as err:
        results.append(CheckResult("two-iteration/rect", FAIL, str(err)))
    try:
        funnel_opt = _coarse_funnel_case()
        results.append(_two_iteration_result("two-iteration/funnel", funnel_opt))
        coupled.append(("funnel lam_opt", funnel_opt))
    except SchwarzNonConvergenceError as err:
        results.append(CheckResult("two-iteration/funnel", FAIL, str(err)))

    kappa, height, l0 = 0.001, 0.5, 16.0
    lam_ref = lambda_opt(kappa, height, l0)
    cases = []
    try:
        for label, lam in (("0.25*opt", 0.25 * lam_ref), ("4*opt", 4.0 * lam_ref), ("lam=1", 1.0)):
            sol = _coarse_rect_case(lam=lam)
            cases.append((label, contraction_ratio(lam, kappa, height, l0), sol))
            coupled.append((f"rect {label}", sol))
        results.append(_contraction_result(cases))
    except SchwarzNonConvergenceError as err:
        results.append(CheckResult("contraction/rate-dominance", FAIL, str(err)))

    converged = [(label, sol) for label, sol in coupled if sol.trace.converged]
    if converged:
        results.append(_residual_result(converged))
    else:
        results.append(CheckResult("constraints/interface-residuals", SKIP, "no converged runs"))
    return results
