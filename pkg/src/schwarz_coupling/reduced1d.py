"""Vertically averaged 1-D reduced model.

On the shallow strip the 2-D problem reduces, after averaging over z, to

    -u'' + a2*u = Fbar         on (0, L0),
    u(0) = gamma1_bar,
    u'(L0) + lam*u(L0) = g,

with a2 = kappa/H collecting the averaged bottom-friction term.  The solver
uses second-order central differences; the Robin end is closed by writing the
PDE at the boundary node and eliminating the ghost value with the centered
Robin condition, which keeps the scheme second order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .elliptic2d import Field2D
from .geometry import DomainSplit, Grid1D

__all__ = [
    "Field1D",
    "Reduced1DProblem",
    "average_forcing",
    "solve_1d",
    "analytic_error_mode",
]


@dataclass(eq=False)
class Field1D:
    """Nodal scalar field on a uniform 1-D grid."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.values.shape:
            raise ValueError(f"shape mismatch: x {self.x.shape}, values {self.values.shape}")
        if len(self.x) < 3:
            raise ValueError("need at least 3 nodes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite field values")

    @property
    def hx(self) -> float:
        return float(self.x[1] - self.x[0])

    @classmethod
    def on(cls, grid: Grid1D, values: np.ndarray | float) -> "Field1D":
        x = grid.x
        return cls(x=x, values=np.broadcast_to(np.asarray(values, dtype=float), x.shape).copy())


@dataclass(frozen=True, eq=False)
class Reduced1DProblem:
    """Data of the reduced two-point boundary value problem."""

    a2: float
    forcing: Field1D
    left_dirichlet: float
    robin_lambda: float
    robin_g: float

    def __post_init__(self) -> None:
        if self.a2 < 0.0:
            raise ValueError(f"need a2 >= 0, got {self.a2}")
        if not self.robin_lambda > 0.0:
            raise ValueError(f"need robin_lambda > 0, got {self.robin_lambda}")


def average_forcing(forcing: Field2D, split: DomainSplit) -> Field1D:
    """Per-column trapezoidal vertical average of F over the reduced region.

    Columns 0..k of the parent grid (x in [0, L0]) are averaged over
    z in [0, H]; in a funnel those columns are exactly the channel nodes.
    """
    grid = split.full.grid
    k = split.interface_index
    jh = split.full.shallow_top_index
    vals = forcing.values[: k + 1, : jh + 1]
    avg = np.trapezoid(vals, dx=grid.hz, axis=1) / (jh * grid.hz)
    return Field1D(x=split.omega1.x, values=avg)


def solve_1d(problem: Reduced1DProblem) -> Field1D:
    """Solve the reduced problem by direct tridiagonal elimination."""
    f = problem.forcing
    n = len(f.x) - 1
    h = f.hx
    inv_h2 = 1.0 / (h * h)
    lam, g = problem.robin_lambda, problem.robin_g

    # unknowns u_1..u_n in banded form (1 super-, 1 sub-diagonal)
    ab = np.zeros((3, n))
    ab[1, :] = 2.0 * inv_h2 + problem.a2
    ab[0, 1:] = -inv_h2  # super-diagonal
    ab[2, :-1] = -inv_h2  # sub-diagonal
    # Robin end: ghost u_{n+1} = u_{n-1} + 2h(g - lam*u_n) folded into the PDE row
    ab[1, -1] += 2.0 * lam / h
    ab[2, -2] = -2.0 * inv_h2

    b = f.values[1:].copy()
    b[0] += problem.left_dirichlet * inv_h2
    b[-1] += 2.0 * g / h

    u = solve_banded((1, 1), ab, b)
    values = np.concatenate(([problem.left_dirichlet], u))
    return Field1D(x=f.x.copy(), values=values)


def analytic_error_mode(alpha: float, a: float, x: np.ndarray | float) -> np.ndarray | float:
    """Interface error mode alpha*sinh(a*x): the shape every successive
    1-D iterate difference takes when the averaged forcing cancels."""
    return alpha * np.sinh(a * np.asarray(x, dtype=float))
