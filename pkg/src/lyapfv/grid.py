"""Uniform cell grids with one ghost layer per side and CFL time steps.

Cell centers are indexed 0..M+1 per axis; indices 0 and M+1 are ghost
cells outside the domain. All interior cells share the same volume.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid on [a_bar, b_bar] with M interior cells."""

    a_bar: float
    b_bar: float
    m: int

    @property
    def dx(self) -> float:
        return (self.b_bar - self.a_bar) / self.m

    def centers(self) -> np.ndarray:
        """Cell centers x_j = a_bar + (j - 1/2) dx for j = 0..M+1."""
        j = np.arange(self.m + 2)
        return self.a_bar + (j - 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        """Interfaces x_{j-1/2} = a_bar + (j-1) dx for j = 0..M+2."""
        j = np.arange(self.m + 3)
        return self.a_bar + (j - 1.0) * self.dx


def build_grid_1d(a_bar: float, b_bar: float, m: int) -> Grid1D:
    if m < 1:
        raise ValidationError(f"interior cell count must be >= 1, got {m}")
    if not (b_bar > a_bar):
        raise ValidationError(f"domain is empty: [{a_bar}, {b_bar}]")
    if not (np.isfinite(a_bar) and np.isfinite(b_bar)):
        raise ValidationError("domain bounds must be finite")
    return Grid1D(float(a_bar), float(b_bar), int(m))


@dataclass(frozen=True)
class GridMD:
    """Tensor product of d uniform 1D grids, full ghost tensor included.

    Storage covers all multi-indices in {0..M_k+1}^d; corner ghosts exist
    but are never read by the directional sweeps.
    """

    axes: tuple[Grid1D, ...]

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.m + 2 for ax in self.axes)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(ax.m for ax in self.axes)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(ax.dx for ax in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def num_interior(self) -> int:
        return int(np.prod(self.counts))

    def interior(self) -> tuple[slice, ...]:
        """Slices selecting the interior block in a grid-shaped array."""
        return tuple(slice(1, ax.m + 1) for ax in self.axes)

    def interior_indices(self) -> list[tuple[int, ...]]:
        return list(product(*(range(1, ax.m + 1) for ax in self.axes)))

    def ghost_left(self, k: int) -> list[tuple[int, ...]]:
        """Multi-indices with k-th entry 0 and all other entries interior."""
        self._check_direction(k)
        ranges = [range(1, ax.m + 1) for ax in self.axes]
        ranges[k] = range(0, 1)
        return list(product(*ranges))

    def ghost_right(self, k: int) -> list[tuple[int, ...]]:
        """Multi-indices with k-th entry M_k+1 and all other entries interior."""
        self._check_direction(k)
        ranges = [range(1, ax.m + 1) for ax in self.axes]
        ranges[k] = range(self.axes[k].m + 1, self.axes[k].m + 2)
        return list(product(*ranges))

    def _check_direction(self, k: int) -> None:
        if not 0 <= k < self.ndim:
            raise ValidationError(f"direction {k} out of range for d={self.ndim}")


def build_grid_md(bounds: Sequence[tuple[float, float]], counts: Sequence[int]) -> GridMD:
    if len(bounds) != len(counts):
        raise ValidationError(
            f"bounds ({len(bounds)}) and counts ({len(counts)}) must have equal length"
        )
    if len(bounds) < 1:
        raise ValidationError("need at least one axis")
    axes = tuple(build_grid_1d(lo, hi, m) for (lo, hi), m in zip(bounds, counts))
    return GridMD(axes)


def cfl_timestep(speeds: Sequence[float], grid: GridMD, cfl: float) -> float:
    """Largest dt with max_k (dt/dx_k)|a_k| equal to the requested CFL number."""
    if not 0.0 < cfl <= 1.0:
        raise ValidationError(f"CFL number must lie in (0, 1], got {cfl}")
    if len(speeds) != grid.ndim:
        raise ValidationError("one speed per axis required")
    for a in speeds:
        if a == 0.0:
            raise ValidationError("advection speeds must be nonzero")
    return cfl * min(dx / abs(a) for dx, a in zip(grid.spacings, speeds))
