"""Five-point finite-difference solver for -Laplace(u) = F on tagged domains.

Boundary conditions are applied per boundary group (tag):

    Dirichlet(trace)        u = trace; rows eliminated into the RHS
    Neumann()               du/dn = 0
    RobinKappa(kappa)       du/dn + kappa*u = 0, kappa >= 0
    RobinInterface(lam, g)  du/dn + lam*u = g, lam > 0 (coupling interface)

Non-Dirichlet conditions use second-order ghost-node elimination: the PDE is
written at the boundary node and the ghost value is removed with the centered
boundary condition.  Each row is then scaled by half per exterior side, which
makes the assembled matrix symmetric positive definite, so the large-system
path can use conjugate gradients (with an algebraic-multigrid preconditioner);
systems at or below DIRECT_SOLVE_MAX_UNKNOWNS unknowns use a cached sparse LU.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import Domain2D, Side, Tag, _snap_index

__all__ = [
    "Field2D",
    "Dirichlet",
    "Neumann",
    "RobinKappa",
    "RobinInterface",
    "BoundarySpec",
    "LinearSystem",
    "LinearSolveError",
    "assemble",
    "solve_reference",
    "interface_trace",
    "DIRECT_SOLVE_MAX_UNKNOWNS",
    "DEFAULT_SOLVE_TOL",
]

DIRECT_SOLVE_MAX_UNKNOWNS = 10_000
DEFAULT_SOLVE_TOL = 1e-10
DEFAULT_SOLVE_MAXITER = 2000

_SIDE_SHIFTS = ((-1, 0), (1, 0), (0, -1), (0, 1))
_OPPOSITE = (Side.E, Side.W, Side.N, Side.S)
_SIDE_SPACING_AXIS = ("x", "x", "z", "z")


class LinearSolveError(RuntimeError):
    """Linear solve failed to reach the requested residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(eq=False)
class Field2D:
    """Nodal scalar field on a tagged domain; zero outside the active mask."""

    domain: Domain2D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.domain.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid {self.domain.grid.shape}")
        act = self.domain.grid.active
        if not np.all(np.isfinite(vals[act])):
            raise ValueError("non-finite values on active nodes")
        self.values = np.where(act, vals, 0.0)

    @classmethod
    def zeros(cls, domain: Domain2D) -> "Field2D":
        return cls(domain=domain, values=np.zeros(domain.grid.shape))

    @classmethod
    def from_function(cls, domain: Domain2D, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "Field2D":
        xx, zz = domain.grid.nodes()
        return cls(domain=domain, values=np.broadcast_to(np.asarray(f(xx, zz), dtype=float), xx.shape).copy())

    def copy(self) -> "Field2D":
        return Field2D(domain=self.domain, values=self.values.copy())


@dataclass(frozen=True)
class Dirichlet:
    """Prescribed trace; scalar or one value per edge node (tag_nodes order)."""

    values: Union[float, np.ndarray]


@dataclass(frozen=True)
class Neumann:
    """Homogeneous natural condition du/dn = 0."""


@dataclass(frozen=True)
class RobinKappa:
    """Friction-type condition du/dn + kappa*u = 0 with kappa >= 0."""

    kappa: float

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ValueError(f"need kappa >= 0, got {self.kappa}")


@dataclass(frozen=True)
class RobinInterface:
    """Coupling condition du/dn + lam*u = g; g scalar or per edge node."""

    lam: float
    g: Union[float, np.ndarray] = 0.0

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            raise ValueError(f"need lam > 0, got {self.lam}")


BC = Union[Dirichlet, Neumann, RobinKappa, RobinInterface]


@dataclass(frozen=True)
class BoundarySpec:
    """One boundary condition per boundary group present in the domain."""

    left: BC | None = None
    right: BC | None = None
    top: BC | None = None
    bottom: BC | None = None
    interface: BC | None = None

    def for_tag(self, tag: Tag) -> BC | None:
        return {
            Tag.LEFT: self.left,
            Tag.RIGHT: self.right,
            Tag.TOP: self.top,
            Tag.BOTTOM: self.bottom,
            Tag.INTERFACE: self.interface,
        }[tag]


def _edge_values(bc_values: Union[float, np.ndarray], nodes: np.ndarray, what: str) -> np.ndarray:
    vals = np.asarray(bc_values, dtype=float)
    if vals.ndim == 0:
        return np.full(len(nodes), float(vals))
    if vals.shape != (len(nodes),):
        raise ValueError(f"{what}: expected scalar or {len(nodes)} per-node values, got shape {vals.shape}")
    return vals


@dataclass(eq=False)
class LinearSystem:
    """Assembled sparse system with the bookkeeping needed to rebuild fields.

    The interface_* arrays expose d(rhs)/d(g) for the Interface Robin data so
    iterative coupling can swap g without reassembling (the matrix does not
    depend on g).  interface_rows follows tag_nodes(Tag.INTERFACE) order.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    index_map: np.ndarray
    domain: Domain2D
    dirichlet_values: np.ndarray
    interface_rows: np.ndarray | None = None
    interface_coeffs: np.ndarray | None = None
    interface_g0: np.ndarray | None = None
    _solve_fn: Callable | None = dc_field(default=None, init=False, repr=False)

    @property
    def n_unknowns(self) -> int:
        return self.matrix.shape[0]

    def rhs_with_interface_data(self, g: Union[float, np.ndarray]) -> np.ndarray:
        """RHS with the Interface Robin data replaced by g."""
        if self.interface_rows is None:
            raise ValueError("system was assembled without an Interface Robin condition")
        g_arr = np.broadcast_to(np.asarray(g, dtype=float), self.interface_rows.shape)
        out = self.rhs.copy()
        out[self.interface_rows] += self.interface_coeffs * (g_arr - self.interface_g0)
        return out

    def _solver(self, tol: float, max_iter: int) -> Callable[[np.ndarray], tuple[np.ndarray, int]]:
        if self._solve_fn is None:
            if self.n_unknowns <= DIRECT_SOLVE_MAX_UNKNOWNS:
                lu = spla.factorized(self.matrix.tocsc())
                self._solve_fn = lambda b: (lu(b), 0)
            else:
                import pyamg

                ml = pyamg.ruge_stuben_solver(self.matrix)
                precond = ml.aspreconditioner(cycle="V")
                def cg_solve(b: np.ndarray) -> tuple[np.ndarray, int]:
                    x, info = spla.cg(self.matrix, b, rtol=tol, atol=0.0, maxiter=max_iter, M=precond)
                    return x, info
                self._solve_fn = cg_solve
        return self._solve_fn

    def solve(
        self,
        tol: float = DEFAULT_SOLVE_TOL,
        max_iter: int = DEFAULT_SOLVE_MAXITER,
        rhs: np.ndarray | None = None,
    ) -> Field2D:
        """Solve for the unknown nodes and rebuild the full nodal field."""
        b = self.rhs if rhs is None else rhs
        x, info = self._solver(tol, max_iter)(b)
        b_norm = float(np.linalg.norm(b))
        if b_norm > 0.0:
            residual = float(np.linalg.norm(b - self.matrix @ x)) / b_norm
        else:
            residual = 0.0
        if info != 0 or not np.isfinite(residual) or residual > 10.0 * tol:
            raise LinearSolveError(
                f"linear solve did not converge: relative residual {residual:.3e} "
                f"(target {tol:.1e}, info={info})",
                residual=residual,
            )
        values = self.dirichlet_values.copy()
        values[self.index_map >= 0] = x
        return Field2D(domain=self.domain, values=values)


def assemble(domain: Domain2D, forcing: Field2D, bcs: BoundarySpec) -> LinearSystem:
    """Assemble -Laplace(u) = F with the given boundary conditions.

    Every tag present in the domain must have a condition.  Dirichlet nodes
    are eliminated (a node is Dirichlet when any of its exterior sides carries
    a Dirichlet group; corners shared with other groups take the trace value).
    """
    grid = domain.grid
    act = grid.active
    tags = domain.edge_tags
    hx, hz = grid.hx, grid.hz

    present = [Tag(t) for t in np.unique(tags) if t != 0]
    for t in present:
        if bcs.for_tag(t) is None:
            raise ValueError(f"no boundary condition for tag {t.name} present in the domain")

    dir_mask = np.zeros(act.shape, dtype=bool)
    dir_vals = np.zeros(act.shape)
    for t in present:
        bc = bcs.for_tag(t)
        if isinstance(bc, Dirichlet):
            nodes = domain.tag_nodes(t)
            vals = _edge_values(bc.values, nodes, f"Dirichlet({t.name})")
            dir_mask[nodes[:, 0], nodes[:, 1]] = True
            dir_vals[nodes[:, 0], nodes[:, 1]] = vals

    unknown = act & ~dir_mask
    n_unknowns = int(unknown.sum())
    if n_unknowns == 0:
        raise ValueError("no unknowns: every active node is Dirichlet")
    index_map = np.full(act.shape, -1, dtype=np.int64)
    index_map[unknown] = np.arange(n_unknowns)

    inv_hx2, inv_hz2 = 1.0 / (hx * hx), 1.0 / (hz * hz)
    side_h = (hx, hx, hz, hz)

    ext = tags > 0
    if np.any(unknown & ext[..., Side.W] & ext[..., Side.E]) or np.any(
        unknown & ext[..., Side.S] & ext[..., Side.N]
    ):
        # both ghosts of one axis would be defined through each other
        raise ValueError("domain is a single grid line thick along one axis")

    diag = np.where(unknown, 2.0 * (inv_hx2 + inv_hz2), 0.0)
    rhs_field = np.where(unknown, forcing.values, 0.0)
    coeffs = [
        np.where(unknown, -inv_hx2, 0.0),
        np.where(unknown, -inv_hx2, 0.0),
        np.where(unknown, -inv_hz2, 0.0),
        np.where(unknown, -inv_hz2, 0.0),
    ]

    iface_nodes = iface_side = iface_g = None
    iface_rows = iface_coeffs = iface_g0 = None
    for s in Side:
        h = side_h[s]
        side_tags = tags[..., s]
        m_any = unknown & (side_tags > 0)
        if not m_any.any():
            continue
        coeffs[_OPPOSITE[s]][m_any] *= 2.0
        coeffs[s][m_any] = 0.0
        for t_val in np.unique(side_tags[m_any]):
            t = Tag(t_val)
            bc = bcs.for_tag(t)
            m = m_any & (side_tags == t_val)
            if isinstance(bc, Neumann):
                continue
            if isinstance(bc, RobinKappa):
                diag[m] += 2.0 * bc.kappa / h
                continue
            if isinstance(bc, RobinInterface):
                diag[m] += 2.0 * bc.lam / h
                nodes = domain.tag_nodes(t)
                g_nodes = _edge_values(bc.g, nodes, f"RobinInterface({t.name}).g")
                g_grid = np.zeros(act.shape)
                g_grid[nodes[:, 0], nodes[:, 1]] = g_nodes
                rhs_field[m] += 2.0 * g_grid[m] / h
                if t is Tag.INTERFACE:
                    iface_nodes, iface_side, iface_g = nodes, s, g_nodes
                continue
            raise ValueError(f"Dirichlet group {t.name} leaked onto an unknown node")

    wx = np.where(unknown & ((tags[..., Side.W] > 0) | (tags[..., Side.E] > 0)), 0.5, 1.0)
    wz = np.where(unknown & ((tags[..., Side.S] > 0) | (tags[..., Side.N] > 0)), 0.5, 1.0)
    w = wx * wz
    diag *= w
    rhs_field *= w
    for s in Side:
        coeffs[s] *= w

    rows = [index_map[unknown]]
    cols = [index_map[unknown]]
    data = [diag[unknown]]
    rhs = rhs_field[unknown]
    for s, (di, dj) in zip(Side, _SIDE_SHIFTS):
        c = coeffs[s]
        ii, jj = np.nonzero(unknown & (c != 0.0))
        ni, nj = ii + di, jj + dj
        cvals = c[ii, jj]
        nb_unknown = unknown[ni, nj]
        rows.append(index_map[ii[nb_unknown], jj[nb_unknown]])
        cols.append(index_map[ni[nb_unknown], nj[nb_unknown]])
        data.append(cvals[nb_unknown])
        nb_dir = dir_mask[ni, nj]
        if nb_dir.any():
            rhs[index_map[ii[nb_dir], jj[nb_dir]]] -= cvals[nb_dir] * dir_vals[ni[nb_dir], nj[nb_dir]]

    matrix = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknowns, n_unknowns),
    ).tocsr()

    if iface_nodes is not None:
        iface_rows = index_map[iface_nodes[:, 0], iface_nodes[:, 1]]
        if np.any(iface_rows < 0):
            raise ValueError("Interface Robin nodes overlap a Dirichlet group")
        iface_coeffs = (2.0 / side_h[iface_side]) * w[iface_nodes[:, 0], iface_nodes[:, 1]]
        iface_g0 = iface_g.copy()

    return LinearSystem(
        matrix=matrix,
        rhs=rhs,
        index_map=index_map,
        domain=domain,
        dirichlet_values=np.where(dir_mask, dir_vals, 0.0),
        interface_rows=iface_rows,
        interface_coeffs=iface_coeffs,
        interface_g0=iface_g0,
    )


def solve_reference(
    domain: Domain2D,
    forcing: Field2D | Callable[[np.ndarray, np.ndarray], np.ndarray],
    gamma1: Union[float, np.ndarray],
    gamma2: Union[float, np.ndarray],
    kappa: float,
    tol: float = DEFAULT_SOLVE_TOL,
) -> Field2D:
    """Ground-truth solve on the full domain.

    Left/Right carry Dirichlet traces gamma1/gamma2, the top group is
    homogeneous Neumann and the bottom has the friction Robin condition.
    """
    if not isinstance(forcing, Field2D):
        forcing = Field2D.from_function(domain, forcing)
    bcs = BoundarySpec(
        left=Dirichlet(gamma1),
        right=Dirichlet(gamma2),
        top=Neumann(),
        bottom=RobinKappa(kappa),
    )
    return assemble(domain, forcing, bcs).solve(tol=tol)


def interface_trace(field: Field2D, which: str = "value", x0: float | None = None) -> np.ndarray:
    """Trace of the field (or its x-derivative) along a vertical interface.

    With x0=None the domain's Interface column is used; a full domain has no
    Interface group, so callers pass the interface abscissa explicitly.  The
    derivative is one-sided second order taken into the domain lying right of
    the interface (exact on fields linear in x).
    """
    grid = field.domain.grid
    if x0 is None:
        i0 = field.domain.interface_column()
    else:
        i0 = _snap_index(x0 - grid.x0, grid.hx, "interface abscissa")
        if not 0 <= i0 <= grid.nx:
            raise ValueError(f"interface abscissa {x0!r} outside the grid")
    js = np.nonzero(grid.active[i0, :])[0]
    if len(js) == 0:
        raise ValueError("interface column has no active nodes")
    if which == "value":
        return field.values[i0, js].copy()
    if which == "ddx":
        if i0 + 2 > grid.nx or not (grid.active[i0 + 1, js].all() and grid.active[i0 + 2, js].all()):
            raise ValueError("need two active columns right of the interface for the derivative")
        v0, v1, v2 = field.values[i0, js], field.values[i0 + 1, js], field.values[i0 + 2, js]
        return (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * grid.hx)
    raise ValueError(f"which must be 'value' or 'ddx', got {which!r}")
