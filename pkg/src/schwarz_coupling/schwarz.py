"""Robin-exchange Schwarz coupling of the 1-D reduced and 2-D models.

One iteration, starting from the current 2-D iterate u2 and its Robin
datum g2 (the exchanged conditions carry opposite outward normals):

    1. g1 = d/dx(mean_z u2) + lam * mean_z u2   at the interface
    2. solve the reduced 1-D problem with Robin data g1            -> u1
    3. g2 = -du1/dx + lam * u1                  at the interface
    4. solve the 2-D problem on omega2 with Robin data g2          -> u2

After the first iteration the interface derivatives are recovered from the
Robin rows each solver just enforced (g1 = 2*lam*mean(u2) - g2_prev and
g2 = 2*lam*u1 - g1) instead of being re-differenced: both solvers eliminate
their boundary ghost with the same centered rule, so this is the identical
quantity without a second truncation error, and the fixed point then
satisfies the averaged value and flux matching constraints to solver
precision.  lambda_opt makes the 1-D side transparent to the outgoing
interface error mode, which collapses the 2-D successive difference at
iteration 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np

from .elliptic2d import (
    DEFAULT_SOLVE_TOL,
    BoundarySpec,
    Dirichlet,
    Field2D,
    Neumann,
    RobinInterface,
    RobinKappa,
    assemble,
    interface_trace,
)
from .forcing import ForcingSpec, forcing_field
from .geometry import DomainSplit, Tag
from .reduced1d import Field1D, Reduced1DProblem, average_forcing, solve_1d

__all__ = [
    "KappaZeroLimitWarning",
    "SchwarzNonConvergenceError",
    "CouplingConfig",
    "IterationTrace",
    "CoupledSolution",
    "restrict",
    "extend",
    "robin_data_for_1d",
    "robin_data_for_2d",
    "lambda_opt",
    "contraction_ratio",
    "check_constraints",
    "schwarz_solve",
    "fitted_contraction_ratios",
]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 50


class KappaZeroLimitWarning(UserWarning):
    """Signals that lambda_opt returned its kappa -> 0 limit value 1/L0."""


class SchwarzNonConvergenceError(RuntimeError):
    """Iteration exhausted max_iter; carries the trace and the last iterates."""

    def __init__(self, message: str, trace: "IterationTrace", solution: "CoupledSolution"):
        super().__init__(message)
        self.trace = trace
        self.solution = solution


def restrict(trace_values: np.ndarray, hz: float) -> float:
    """Vertical trapezoidal average of an interface trace (R operator)."""
    v = np.asarray(trace_values, dtype=float)
    if v.ndim != 1 or len(v) < 2:
        raise ValueError("need a 1-D trace with at least 2 nodes")
    return float(np.trapezoid(v, dx=hz) / ((len(v) - 1) * hz))


def extend(value: float, n_nodes: int) -> np.ndarray:
    """Constant-in-z extension of a 1-D interface value (E operator)."""
    return np.full(n_nodes, float(value))


def robin_data_for_1d(u2: Field2D, lam: float) -> float:
    """Robin datum the 2-D iterate hands to the 1-D side:
    d/dx(mean u2) + lam * mean(u2) at the interface (outward normal +x)."""
    hz = u2.domain.grid.hz
    val = restrict(interface_trace(u2, "value"), hz)
    ddx = restrict(interface_trace(u2, "ddx"), hz)
    return ddx + lam * val


def robin_data_for_2d(u1: Field1D, lam: float) -> float:
    """Robin datum the 1-D iterate hands to the 2-D side:
    -du1/dx + lam*u1 at the interface (outward normal of omega2 is -x).
    The derivative is one-sided second order from inside the reduced region."""
    v = u1.values
    ddx = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * u1.hx)
    return float(-ddx + lam * v[-1])


def lambda_opt(kappa: float, H: float, L0: float) -> float:
    """Transparency-optimal Robin parameter a*coth(a*L0), a = sqrt(kappa/H).

    Independent of where the interface sits relative to the forcing; for
    kappa = 0 the limit 1/L0 is returned and flagged with a warning.
    """
    if kappa < 0.0 or H <= 0.0 or L0 <= 0.0:
        raise ValueError(f"need kappa >= 0, H > 0, L0 > 0; got {kappa}, {H}, {L0}")
    if kappa == 0.0:
        warnings.warn("kappa = 0: returning the limit value 1/L0", KappaZeroLimitWarning, stacklevel=2)
        return 1.0 / L0
    a = math.sqrt(kappa / H)
    t = a * L0
    if t < 1e-6:
        # series of a*coth(a*L0) to avoid cancellation
        return 1.0 / L0 + a * a * L0 / 3.0
    return a / math.tanh(t)


def contraction_ratio(lam: float, kappa: float, H: float, L0: float) -> float:
    """Per-iteration bound |B/A| on the fitted interface-mode amplitude decay,
    with A = a*cosh(aL0) + lam*sinh(aL0) and B = -a*cosh(aL0) + lam*sinh(aL0).

    Evaluated in the overflow-safe form |lam*tanh(aL0) - a| / (lam*tanh(aL0) + a);
    it vanishes at lam = lambda_opt and tends to 1 as lam -> 0+."""
    if not lam > 0.0:
        raise ValueError(f"need lam > 0, got {lam}")
    if kappa < 0.0 or H <= 0.0 or L0 <= 0.0:
        raise ValueError(f"need kappa >= 0, H > 0, L0 > 0; got {kappa}, {H}, {L0}")
    if kappa == 0.0:
        return abs(lam * L0 - 1.0) / (lam * L0 + 1.0)
    a = math.sqrt(kappa / H)
    th = math.tanh(a * L0)
    return abs(lam * th - a) / (lam * th + a)


@dataclass(frozen=True, eq=False)
class CouplingConfig:
    """Inputs of one coupled solve.

    gamma1 is the full 2-D left-boundary trace; the reduced model receives
    its trapezoidal average (gamma1_bar).  lam must be positive; lambda_opt
    provides the transparency-optimal choice.
    """

    split: DomainSplit
    kappa: float
    lam: float
    forcing: ForcingSpec
    gamma1: Union[float, np.ndarray] = 0.0
    gamma2: Union[float, np.ndarray] = 0.0
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    initial_guess: Field2D | None = None

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ValueError(f"need kappa >= 0, got {self.kappa}")
        if not self.lam > 0.0:
            raise ValueError(f"need lam > 0, got {self.lam}")
        if not self.tol > 0.0:
            raise ValueError(f"need tol > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"need max_iter >= 1, got {self.max_iter}")
        if self.initial_guess is not None and self.initial_guess.domain is not self.split.omega2:
            if self.initial_guess.values.shape != self.split.omega2.grid.shape:
                raise ValueError("initial_guess is not a field on omega2")

    @property
    def H(self) -> float:
        return self.split.shallow_height

    @property
    def a2(self) -> float:
        return self.kappa / self.H

    @property
    def gamma1_bar(self) -> float:
        g = np.asarray(self.gamma1, dtype=float)
        if g.ndim == 0:
            return float(g)
        return restrict(g, self.split.full.grid.hz)


@dataclass
class IterationTrace:
    """Per-iteration convergence history (iteration numbers are 1-based;
    differences at iteration 1 are taken against the zero/initial fields)."""

    diff1: list[float] = field(default_factory=list)
    diff2: list[float] = field(default_factory=list)
    alpha: list[float] = field(default_factory=list)
    value_residual: list[float] = field(default_factory=list)
    flux_residual: list[float] = field(default_factory=list)
    converged: bool = False

    COLUMNS = ("iter", "diff1", "diff2", "alpha", "res_value", "res_flux")

    @property
    def iterations(self) -> int:
        return len(self.diff1)

    def rows(self) -> Iterator[tuple[float, ...]]:
        for k in range(self.iterations):
            yield (
                k + 1,
                self.diff1[k],
                self.diff2[k],
                self.alpha[k],
                self.value_residual[k],
                self.flux_residual[k],
            )


@dataclass(eq=False)
class CoupledSolution:
    """Final iterates plus the Robin data (g1, g2) they were solved with."""

    u1: Field1D
    u2: Field2D
    trace: IterationTrace
    lam: float
    g1: float = 0.0
    g2: float = 0.0


def check_constraints(u1: Field1D, u2: Field2D, lam: float, g1: float, g2: float) -> tuple[float, float]:
    """Residuals of the averaged matching constraints at the interface.

    Value: |u1 - mean(u2)|.  Flux: |f1 - f2| with each side's flux recovered
    from the Robin row its solver enforced, f1 = g1 - lam*u1 (normal +x) and
    f2 = lam*mean(u2) - g2 (normal -x flips the sign).  Both residuals vanish
    at the iteration's fixed point."""
    val2 = restrict(interface_trace(u2, "value"), u2.domain.grid.hz)
    val1 = float(u1.values[-1])
    f1 = g1 - lam * val1
    f2 = lam * val2 - g2
    return abs(val1 - val2), abs(f1 - f2)


def schwarz_solve(config: CouplingConfig, solve_tol: float = DEFAULT_SOLVE_TOL) -> CoupledSolution:
    """Run the alternating Robin-exchange iteration to its fixed point.

    Stops when both successive-iterate sup differences fall below config.tol;
    raises SchwarzNonConvergenceError (carrying trace and last iterates) when
    max_iter is exhausted.  The 2-D operator is assembled and factored once;
    only the interface datum changes between iterations.
    """
    split = config.split
    dom2 = split.omega2
    lam = config.lam

    f_full = forcing_field(split.full, config.forcing)
    f_bar = average_forcing(f_full, split)
    f_2 = forcing_field(dom2, config.forcing)
    bcs = BoundarySpec(
        right=Dirichlet(config.gamma2),
        top=Neumann(),
        bottom=RobinKappa(config.kappa),
        interface=RobinInterface(lam, 0.0),
    )
    system = assemble(dom2, f_2, bcs)

    a = math.sqrt(config.a2)
    mode_scale = math.sinh(a * split.L0) if a > 0.0 else split.L0

    u2 = config.initial_guess if config.initial_guess is not None else Field2D.zeros(dom2)
    u1_prev = np.zeros(split.omega1.n + 1)
    act2 = dom2.grid.active
    hz = dom2.grid.hz
    trace = IterationTrace()
    u1 = None
    g1 = g2 = 0.0

    for it in range(config.max_iter):
        if it == 0:
            # no Robin row to recover a derivative from yet: difference the guess
            g1 = robin_data_for_1d(u2, lam) if config.initial_guess is not None else 0.0
        else:
            g1 = 2.0 * lam * restrict(interface_trace(u2, "value"), hz) - g2
        u1 = solve_1d(
            Reduced1DProblem(
                a2=config.a2,
                forcing=f_bar,
                left_dirichlet=config.gamma1_bar,
                robin_lambda=lam,
                robin_g=g1,
            )
        )
        g2 = 2.0 * lam * float(u1.values[-1]) - g1
        u2_new = system.solve(tol=solve_tol, rhs=system.rhs_with_interface_data(g2))

        d1 = float(np.max(np.abs(u1.values - u1_prev)))
        d2 = float(np.max(np.abs(u2_new.values[act2] - u2.values[act2])))
        alpha = (float(u1.values[-1]) - float(u1_prev[-1])) / mode_scale
        res_v, res_f = check_constraints(u1, u2_new, lam, g1, g2)

        trace.diff1.append(d1)
        trace.diff2.append(d2)
        trace.alpha.append(alpha)
        trace.value_residual.append(res_v)
        trace.flux_residual.append(res_f)

        u1_prev = u1.values
        u2 = u2_new
        if d1 <= config.tol and d2 <= config.tol:
            trace.converged = True
            break

    solution = CoupledSolution(u1=u1, u2=u2, trace=trace, lam=lam, g1=g1, g2=g2)
    if not trace.converged:
        raise SchwarzNonConvergenceError(
            f"no convergence in {config.max_iter} iterations "
            f"(last diffs {trace.diff1[-1]:.3e}, {trace.diff2[-1]:.3e}, tol {config.tol:.1e})",
            trace=trace,
            solution=solution,
        )
    return solution


def fitted_contraction_ratios(trace: IterationTrace, floor: float) -> list[float]:
    """Ratios |alpha_{k+1}/alpha_k| over consecutive amplitudes that both sit
    above the noise floor (once an amplitude falls below the stopping
    tolerance the quotient stops measuring the contraction)."""
    out = []
    for a_prev, a_next in zip(trace.alpha, trace.alpha[1:]):
        if abs(a_prev) > floor and abs(a_next) > floor:
            out.append(abs(a_next / a_prev))
    return out
