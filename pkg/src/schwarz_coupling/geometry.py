"""Structured grids, tagged domains, and interface splitting.

The computational domains are unions of axis-aligned rectangles sampled on a
uniform tensor grid.  Two shapes are supported: a thin rectangle and a stepped
"funnel" (a narrow channel opening into a wide box).  A domain can be split at
a vertical line x = L0 into a 1-D reduced region (0, L0) and a 2-D remainder
whose left boundary becomes the coupling interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

__all__ = [
    "Tag",
    "Side",
    "Grid2D",
    "Grid1D",
    "Rectangle",
    "Funnel",
    "Domain2D",
    "DomainSplit",
    "build_rectangle",
    "build_funnel",
    "split_at_interface",
]

_SNAP_RTOL = 1e-9


class Tag(IntEnum):
    """Boundary groups. 0 is reserved for interior (untagged) node sides."""

    LEFT = 1
    RIGHT = 2
    TOP = 3
    BOTTOM = 4
    INTERFACE = 5


class Side(IntEnum):
    """Node side index into the edge-tag array (outward direction)."""

    W = 0
    E = 1
    S = 2
    N = 3


# Index offsets per side, aligned with Side.
_SIDE_SHIFTS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _snap_index(value: float, h: float, what: str) -> int:
    """Return value/h as an exact integer, or raise naming the neighbors."""
    k = int(round(value / h))
    if abs(k * h - value) > _SNAP_RTOL * max(1.0, abs(value)):
        lo, hi = float(np.floor(value / h) * h), float(np.ceil(value / h) * h)
        raise ValueError(
            f"{what}={value!r} is not on the grid (spacing {h!r}); "
            f"nearest valid abscissas are {lo!r} and {hi!r}"
        )
    return k


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Uniform tensor grid with an active-node mask.

    Node (i, j) sits at (x0 + i*hx, z0 + j*hz), i in 0..nx, j in 0..nz
    (nx, nz count cells).  The mask selects the nodes belonging to the
    domain; it is the union of axis-aligned rectangles by construction.
    """

    nx: int
    nz: int
    hx: float
    hz: float
    x0: float = 0.0
    z0: float = 0.0
    active: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.nx < 2 or self.nz < 2:
            raise ValueError(f"need nx, nz >= 2, got nx={self.nx}, nz={self.nz}")
        if not (self.hx > 0.0 and self.hz > 0.0):
            raise ValueError(f"need positive spacings, got hx={self.hx}, hz={self.hz}")
        act = self.active
        if act is None:
            act = np.ones(self.shape, dtype=bool)
        else:
            act = np.asarray(act, dtype=bool)
            if act.shape != self.shape:
                raise ValueError(f"active mask shape {act.shape} != {self.shape}")
        object.__setattr__(self, "active", _freeze(act.copy()))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx + 1, self.nz + 1)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.hx * np.arange(self.nx + 1)

    @property
    def z(self) -> np.ndarray:
        return self.z0 + self.hz * np.arange(self.nz + 1)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays of shape (nx+1, nz+1), 'ij' indexing."""
        return np.meshgrid(self.x, self.z, indexing="ij")

    def n_active(self) -> int:
        return int(self.active.sum())


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D node grid for the reduced region (n cells)."""

    n: int
    hx: float
    x0: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need n >= 2 cells, got {self.n}")
        if not self.hx > 0.0:
            raise ValueError(f"need positive spacing, got {self.hx}")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.hx * np.arange(self.n + 1)

    @property
    def length(self) -> float:
        return self.n * self.hx


@dataclass(frozen=True)
class Rectangle:
    """Thin rectangle (0, L) x (0, H)."""

    L: float
    H: float

    @property
    def shallow_height(self) -> float:
        return self.H

    @property
    def shallow_length(self) -> float:
        return self.L


@dataclass(frozen=True)
class Funnel:
    """Stepped funnel: channel (0, channel_len) x (0, H) opening into the box
    (channel_len, channel_len + expansion_len) x (0, l), with l >= H."""

    channel_len: float
    H: float
    expansion_len: float
    l: float

    @property
    def shallow_height(self) -> float:
        return self.H

    @property
    def shallow_length(self) -> float:
        return self.channel_len


@dataclass(frozen=True, eq=False)
class Domain2D:
    """A tagged grid: active mask plus a boundary tag per exterior node side.

    edge_tags has shape (nx+1, nz+1, 4); entry (i, j, s) is the Tag of the
    exterior face of node (i, j) on side s, or 0 when that side is interior.
    blocks lists the node-index rectangles (i0, i1, j0, j1), inclusive, whose
    union is the active region; quadrature and gradients work per block.
    """

    grid: Grid2D
    edge_tags: np.ndarray = field(repr=False)
    shape: Rectangle | Funnel = field(default=None)  # type: ignore[assignment]
    blocks: tuple[tuple[int, int, int, int], ...] = ()

    def __post_init__(self) -> None:
        tags = np.asarray(self.edge_tags, dtype=np.int8)
        if tags.shape != (*self.grid.shape, 4):
            raise ValueError(f"edge_tags shape {tags.shape} != {(*self.grid.shape, 4)}")
        object.__setattr__(self, "edge_tags", _freeze(tags.copy()))
        ext = exterior_sides(self.grid.active)
        if np.any(ext & (self.edge_tags == 0)):
            raise ValueError("untagged exterior node side (boundary tags must cover the boundary)")
        if np.any(~ext & (self.edge_tags != 0)):
            raise ValueError("tag assigned to an interior node side")

    @property
    def shallow_height(self) -> float:
        return self.shape.shallow_height

    @property
    def shallow_top_index(self) -> int:
        """j index of z = H (top of the shallow region)."""
        return _snap_index(self.shallow_height - self.grid.z0, self.grid.hz, "H")

    def has_tag(self, tag: Tag) -> bool:
        return bool(np.any(self.edge_tags == int(tag)))

    def tag_nodes(self, tag: Tag) -> np.ndarray:
        """(n, 2) array of node indices carrying `tag` on any side,
        sorted lexicographically by (i, j); deduplicated."""
        i, j, _ = np.nonzero(self.edge_tags == int(tag))
        pairs = np.unique(np.stack([i, j], axis=1), axis=0)
        return pairs

    def interface_column(self) -> int:
        """Column index of the (vertical) Interface boundary."""
        nodes = self.tag_nodes(Tag.INTERFACE)
        if len(nodes) == 0:
            raise ValueError("domain has no Interface boundary")
        cols = np.unique(nodes[:, 0])
        if len(cols) != 1:
            raise ValueError("Interface tag is not a single vertical column")
        return int(cols[0])


def exterior_sides(active: np.ndarray) -> np.ndarray:
    """Boolean (nnx, nnz, 4): active node sides whose neighbor is missing."""
    out = np.zeros((*active.shape, 4), dtype=bool)
    for s, (di, dj) in enumerate(_SIDE_SHIFTS):
        nb = np.zeros_like(active)
        src = (
            slice(max(0, di), active.shape[0] + min(0, di)),
            slice(max(0, dj), active.shape[1] + min(0, dj)),
        )
        dst = (
            slice(max(0, -di), active.shape[0] + min(0, -di)),
            slice(max(0, -dj), active.shape[1] + min(0, -dj)),
        )
        nb[dst] = active[src]
        out[..., s] = active & ~nb
    return out


def _tags_for_rectangle(grid: Grid2D) -> np.ndarray:
    tags = np.zeros((*grid.shape, 4), dtype=np.int8)
    tags[0, :, Side.W] = Tag.LEFT
    tags[-1, :, Side.E] = Tag.RIGHT
    tags[:, 0, Side.S] = Tag.BOTTOM
    tags[:, -1, Side.N] = Tag.TOP
    return tags


def build_rectangle(L: float, H: float, nx: int, nz: int) -> Domain2D:
    """Rectangle (0, L) x (0, H) with nx-by-nz cells.

    Boundary groups: Left (x=0), Right (x=L), Bottom (z=0), Top (z=H).
    """
    if not (L > 0.0 and H > 0.0):
        raise ValueError(f"need positive extents, got L={L}, H={H}")
    grid = Grid2D(nx=nx, nz=nz, hx=L / nx, hz=H / nz)
    return Domain2D(
        grid=grid,
        edge_tags=_tags_for_rectangle(grid),
        shape=Rectangle(L=L, H=H),
        blocks=((0, nx, 0, nz),),
    )


def build_funnel(
    channel_len: float,
    H: float,
    expansion_len: float | None,
    l: float,
    hx: float,
    hz: float,
) -> Domain2D:
    """Stepped funnel from a channel of height H and a box of height l >= H.

    All four extents must be integer multiples of the spacings.  The vertical
    wall created by the expansion (x = channel_len, H < z <= l) carries the
    Top tag: the whole upper boundary is one homogeneous-Neumann group.
    expansion_len=None defaults to l/3.
    """
    if expansion_len is None:
        expansion_len = l / 3.0
    if not (channel_len > 0.0 and H > 0.0 and expansion_len > 0.0):
        raise ValueError("need positive channel_len, H, expansion_len")
    if l < H:
        raise ValueError(f"need l >= H, got l={l} < H={H}")
    ic = _snap_index(channel_len, hx, "channel_len")
    ie = _snap_index(expansion_len, hx, "expansion_len")
    jh = _snap_index(H, hz, "H")
    jl = _snap_index(l, hz, "l")
    nx, nz = ic + ie, jl
    if min(ic, ie) < 1 or jh < 1:
        raise ValueError("funnel extents too small for the given spacings")

    active = np.zeros((nx + 1, nz + 1), dtype=bool)
    active[: ic + 1, : jh + 1] = True  # channel
    active[ic:, :] = True  # box

    tags = np.zeros((nx + 1, nz + 1, 4), dtype=np.int8)
    tags[0, : jh + 1, Side.W] = Tag.LEFT
    tags[-1, :, Side.E] = Tag.RIGHT
    tags[:, 0, Side.S] = Tag.BOTTOM
    tags[:ic, jh, Side.N] = Tag.TOP  # channel lid; (ic, jh) has an active N neighbor
    tags[ic:, -1, Side.N] = Tag.TOP  # box lid
    if jh < nz:
        tags[ic, jh + 1 :, Side.W] = Tag.TOP  # expansion wall, outward normal -x
    grid = Grid2D(nx=nx, nz=nz, hx=hx, hz=hz, active=active)
    blocks = ((0, ic, 0, jh), (ic, nx, 0, nz)) if jh < nz else ((0, nx, 0, nz),)
    return Domain2D(
        grid=grid,
        edge_tags=tags,
        shape=Funnel(channel_len=channel_len, H=H, expansion_len=expansion_len, l=l),
        blocks=blocks,
    )


@dataclass(frozen=True, eq=False)
class DomainSplit:
    """A domain cut at x = L0: 1-D reduced region + 2-D remainder.

    omega2 reuses the parent's grid alignment (its node (0, j) is the parent's
    node (interface_index, j)); its left boundary is re-tagged Interface.
    """

    full: Domain2D
    omega1: Grid1D
    omega2: Domain2D
    L0: float
    interface_index: int

    @property
    def hx(self) -> float:
        return self.full.grid.hx

    @property
    def shallow_height(self) -> float:
        return self.full.shallow_height


def split_at_interface(domain: Domain2D, L0: float) -> DomainSplit:
    """Split `domain` at the grid line x = L0.

    L0 must lie on a grid line (no silent snapping) and strictly inside the
    shallow part: for the funnel, L0 < channel_len.  Both sides keep at least
    two cells so one-sided second-order interface derivatives exist.
    """
    grid = domain.grid
    k = _snap_index(L0 - grid.x0, grid.hx, "L0")
    if isinstance(domain.shape, Funnel):
        ic = _snap_index(domain.shape.channel_len, grid.hx, "channel_len")
        if k >= ic:
            raise ValueError(
                f"L0={L0!r} must lie strictly inside the channel (x < {domain.shape.channel_len!r})"
            )
    if k < 2 or k > grid.nx - 2:
        raise ValueError(f"L0={L0!r} leaves fewer than two cells on one side of the interface")

    sub_active = grid.active[k:, :]
    sub_grid = Grid2D(
        nx=grid.nx - k,
        nz=grid.nz,
        hx=grid.hx,
        hz=grid.hz,
        x0=grid.x0 + k * grid.hx,
        z0=grid.z0,
        active=sub_active,
    )
    sub_tags = domain.edge_tags[k:, :, :].copy()
    ext0 = exterior_sides(sub_active)[0, :, Side.W]
    sub_tags[0, ext0, Side.W] = Tag.INTERFACE

    blocks = []
    for (i0, i1, j0, j1) in domain.blocks:
        lo, hi = max(i0 - k, 0), i1 - k
        if hi > lo:
            blocks.append((lo, hi, j0, j1))
    omega2 = Domain2D(grid=sub_grid, edge_tags=sub_tags, shape=domain.shape, blocks=tuple(blocks))
    omega1 = Grid1D(n=k, hx=grid.hx, x0=grid.x0)
    return DomainSplit(full=domain, omega1=omega1, omega2=omega2, L0=L0, interface_index=k)
