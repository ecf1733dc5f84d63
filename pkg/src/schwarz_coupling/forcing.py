"""Source-term descriptors.

A forcing is a callable f(x, z, shallow_height) -> array, so the same
descriptor can be re-sampled when the geometry is rebuilt (aspect-ratio
sweeps rescale the height, and height-dependent sources must follow).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .elliptic2d import Field2D
from .geometry import Domain2D

__all__ = ["ForcingSpec", "GaussianSine", "ConstantForcing", "forcing_field"]


class ForcingSpec(Protocol):
    def __call__(self, x: np.ndarray, z: np.ndarray, shallow_height: float) -> np.ndarray: ...


@dataclass(frozen=True)
class GaussianSine:
    """m * exp(-(x - x_star)^2) * sin(2*pi*z/H): localized in x, one full
    vertical period, hence zero vertical average over (0, H)."""

    m: float = 1.0
    x_star: float = 19.0

    def __call__(self, x: np.ndarray, z: np.ndarray, shallow_height: float) -> np.ndarray:
        return self.m * np.exp(-((x - self.x_star) ** 2)) * np.sin(2.0 * np.pi * z / shallow_height)


@dataclass(frozen=True)
class ConstantForcing:
    value: float = 1.0

    def __call__(self, x: np.ndarray, z: np.ndarray, shallow_height: float) -> np.ndarray:
        return np.full(np.broadcast_shapes(np.shape(x), np.shape(z)), self.value)


def forcing_field(domain: Domain2D, forcing: ForcingSpec) -> Field2D:
    """Sample a forcing descriptor on a domain's active nodes."""
    xx, zz = domain.grid.nodes()
    vals = np.broadcast_to(np.asarray(forcing(xx, zz, domain.shallow_height), dtype=float), xx.shape)
    return Field2D(domain=domain, values=vals.copy())
