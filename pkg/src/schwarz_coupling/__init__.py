"""Dimensionally heterogeneous coupling of a 1-D reduced model with a 2-D
elliptic model through Robin-exchange Schwarz iteration.

The 2-D problem is -Laplace(u) = F on a thin rectangle or a stepped funnel
with a friction-type Robin bottom; over the shallow part the solution is
nearly constant vertically, so it can be replaced by a vertically averaged
1-D model up to an interface at x = L0.  The two models are coupled by
alternating solves that exchange Robin data; at the transparency-optimal
Robin parameter the iteration converges in two steps.  Analysis utilities
quantify the model-reduction error against a full 2-D reference and its
a priori bound M * eps * sqrt(1 + delta^2).
"""

from .analysis import (
    ErrorReport,
    LambdaTraceEntry,
    RelativeError,
    SweepRow,
    bound_rhs,
    calibrate_M,
    delta_factor,
    detect_threshold,
    h1_error,
    h1_norm,
    l2_error,
    l2_norm,
    linf_error,
    linf_norm,
    rebuild_with_height,
    slice_to_omega2,
    sweep_epsilon,
    sweep_interface,
    sweep_lambda,
)
from .elliptic2d import (
    BoundarySpec,
    Dirichlet,
    Field2D,
    LinearSolveError,
    LinearSystem,
    Neumann,
    RobinInterface,
    RobinKappa,
    assemble,
    interface_trace,
    solve_reference,
)
from .forcing import ConstantForcing, ForcingSpec, GaussianSine, forcing_field
from .geometry import (
    Domain2D,
    DomainSplit,
    Funnel,
    Grid1D,
    Grid2D,
    Rectangle,
    Side,
    Tag,
    build_funnel,
    build_rectangle,
    split_at_interface,
)
from .reduced1d import Field1D, Reduced1DProblem, analytic_error_mode, average_forcing, solve_1d
from .schwarz import (
    CoupledSolution,
    CouplingConfig,
    IterationTrace,
    KappaZeroLimitWarning,
    SchwarzNonConvergenceError,
    check_constraints,
    contraction_ratio,
    extend,
    fitted_contraction_ratios,
    lambda_opt,
    restrict,
    robin_data_for_1d,
    robin_data_for_2d,
    schwarz_solve,
)
from .verification import CheckResult, run_verification

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # geometry
    "Tag",
    "Side",
    "Grid1D",
    "Grid2D",
    "Rectangle",
    "Funnel",
    "Domain2D",
    "DomainSplit",
    "build_rectangle",
    "build_funnel",
    "split_at_interface",
    # fields and solvers
    "Field1D",
    "Field2D",
    "Reduced1DProblem",
    "average_forcing",
    "solve_1d",
    "analytic_error_mode",
    "BoundarySpec",
    "Dirichlet",
    "Neumann",
    "RobinKappa",
    "RobinInterface",
    "LinearSystem",
    "LinearSolveError",
    "assemble",
    "solve_reference",
    "interface_trace",
    # forcing
    "ForcingSpec",
    "GaussianSine",
    "ConstantForcing",
    "forcing_field",
    # coupling
    "CouplingConfig",
    "CoupledSolution",
    "IterationTrace",
    "KappaZeroLimitWarning",
    "SchwarzNonConvergenceError",
    "schwarz_solve",
    "check_constraints",
    "lambda_opt",
    "contraction_ratio",
    "fitted_contraction_ratios",
    "restrict",
    "extend",
    "robin_data_for_1d",
    "robin_data_for_2d",
    # analysis
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
    "calibrate_M",
    "SweepRow",
    "ErrorReport",
    "sweep_interface",
    "sweep_epsilon",
    "sweep_lambda",
    "LambdaTraceEntry",
    "detect_threshold",
    "rebuild_with_height",
    # verification
    "CheckResult",
    "run_verification",
]
