"""Grids, tagged domains, and interface splitting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schwarz_coupling import build_funnel, build_rectangle, split_at_interface
from schwarz_coupling.geometry import Side, Tag


def test_rectangle_grid_geometry():
    dom = build_rectangle(2.0, 0.5, 8, 4)
    assert (dom.grid.nx, dom.grid.nz) == (8, 4)
    assert dom.grid.hx == pytest.approx(0.25)
    assert dom.grid.hz == pytest.approx(0.125)
    xx, zz = dom.grid.nodes()
    assert xx.shape == (9, 5)
    assert xx[-1, 0] == pytest.approx(2.0)
    assert zz[0, -1] == pytest.approx(0.5)
    assert dom.grid.active.all()
    assert dom.blocks == ((0, 8, 0, 4),)
    assert dom.shallow_height == pytest.approx(0.5)


def test_rectangle_edge_tags():
    dom = build_rectangle(1.0, 1.0, 4, 4)
    tags = dom.edge_tags
    assert (tags[0, :, Side.W] == Tag.LEFT.value).all()
    assert (tags[-1, :, Side.E] == Tag.RIGHT.value).all()
    assert (tags[:, 0, Side.S] == Tag.BOTTOM.value).all()
    assert (tags[:, -1, Side.N] == Tag.TOP.value).all()
    # interior nodes carry no boundary tag on any side
    assert (tags[1:-1, 1:-1, :] == 0).all()


def test_funnel_masks_channel_above_height():
    dom = build_funnel(1.0, 0.25, 0.5, 1.0, 0.125, 0.125)
    assert (dom.grid.nx, dom.grid.nz) == (12, 8)
    assert dom.blocks == ((0, 8, 0, 2), (8, 12, 0, 8))
    active = dom.grid.active
    # channel nodes above z = H inactive, expansion column fully active
    assert not active[3, 5]
    assert active[3, 2]
    assert active[9, :].all()
    assert dom.shallow_height == pytest.approx(0.25)


def test_funnel_wall_is_insulated():
    dom = build_funnel(1.0, 0.25, 0.5, 1.0, 0.125, 0.125)
    ic = 8  # first expansion column
    wall = dom.edge_tags[ic, 3:, Side.W]
    assert (wall == Tag.TOP.value).all()


def test_funnel_default_expansion_length():
    # expansion_len=None falls back to l/3
    dom = build_funnel(2.0, 0.05, None, 3.0, 0.05, 0.025)
    assert dom.grid.nx * dom.grid.hx == pytest.approx(3.0)


def test_split_partitions_rectangle():
    dom = build_rectangle(2.0, 0.5, 8, 4)
    split = split_at_interface(dom, 1.0)
    assert split.interface_index == 4
    assert split.L0 == pytest.approx(1.0)
    assert split.omega1.x[-1] == pytest.approx(1.0)
    assert split.omega2.grid.x0 == pytest.approx(1.0)
    assert split.omega2.grid.nx == 4
    # the left edge of omega2 becomes the coupling interface
    assert (split.omega2.edge_tags[0, :, Side.W] == Tag.INTERFACE.value).all()


def test_split_guards():
    dom = build_rectangle(2.0, 0.5, 8, 4)
    with pytest.raises(ValueError, match="not on the grid"):
        split_at_interface(dom, 0.9)
    with pytest.raises(ValueError):
        split_at_interface(dom, 0.25)  # k=1 leaves no room for the 1-D stencil
    with pytest.raises(ValueError):
        split_at_interface(dom, 2.0)


def test_funnel_split_must_stay_in_channel():
    dom = build_funnel(1.0, 0.25, 0.5, 1.0, 0.125, 0.125)
    split = split_at_interface(dom, 0.5)
    assert split.omega2.grid.x0 == pytest.approx(0.5)
    with pytest.raises(ValueError):
        split_at_interface(dom, 1.25)  # inside the expansion


def test_off_grid_message_names_neighbors():
    dom = build_rectangle(2.0, 0.5, 8, 4)
    with pytest.raises(ValueError, match=r"0\.75 and 1\.0"):
        split_at_interface(dom, 0.9)


@given(
    nx=st.integers(min_value=6, max_value=40),
    k=st.data(),
)
def test_split_roundtrip_consistency(nx, k):
    dom = build_rectangle(float(nx), 1.0, nx, 3)
    idx = k.draw(st.integers(min_value=2, max_value=nx - 2))
    split = split_at_interface(dom, float(idx))
    assert len(split.omega1.x) == idx + 1
    assert split.omega2.grid.nx == nx - idx
    # omega1 end and omega2 start meet at the interface abscissa
    assert split.omega1.x[-1] == pytest.approx(split.omega2.grid.x0)
    assert split.interface_index == idx
