"""Uniform cell-centered 2D grid, scalar fields and their discrete norms."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise InvalidParameterError(
                f"Grid needs at least 3x3 cells; got nx={self.nx}, ny={self.ny}"
            )
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InvalidParameterError(
                f"Empty domain [{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"
            )

    @classmethod
    def from_spacing(
        cls,
        x_min: float,
        x_max: float,
        y_min: float,
        y_max: float,
        dx: float,
        dy: float | None = None,
    ) -> "GridSpec":
        dy = dx if dy is None else dy
        if dx <= 0 or dy <= 0:
            raise InvalidParameterError(f"Cell sizes must be positive: {dx=}, {dy=}")
        nx = int(round((x_max - x_min) / dx))
        ny = int(round((y_max - y_min) / dy))
        return cls(x_min, x_max, y_min, y_max, nx, ny)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nx, self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        # values[i, j] sits at (x_centers[i], y_centers[j])
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing="ij")

    def __str__(self) -> str:
        return (
            f"[{self.x_min:g}, {self.x_max:g}] x [{self.y_min:g}, {self.y_max:g}] "
            f"@ {self.nx}x{self.ny} (dx={self.dx:g}, dy={self.dy:g})"
        )


@dataclass(frozen=True, eq=False)
class Field:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C")
        assert values.shape == self.grid.shape, (
            f"Field shape {values.shape} does not match grid {self.grid.shape}"
        )
        # fields are shared between observers and the driver; keep them read-only
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "Field":
        x, y = grid.mesh()
        return cls(grid, np.broadcast_to(fn(x, y), grid.shape))

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


def l1_norm(f: Field) -> float:
    assert f.is_finite()
    return float(np.abs(f.values).sum() * f.grid.dx * f.grid.dy)


def linf_norm(f: Field) -> float:
    assert f.is_finite()
    return float(np.abs(f.values).max())


def total_variation(f: Field) -> float:
    # anisotropic, forward differences between interior neighbours only
    jumps_x = np.abs(np.diff(f.values, axis=0)).sum()
    jumps_y = np.abs(np.diff(f.values, axis=1)).sum()
    return float(f.grid.dy * jumps_x + f.grid.dx * jumps_y)


def mass(f: Field) -> float:
    # signed integral, used for the mass time series
    return float(f.values.sum() * f.grid.dx * f.grid.dy)


def interior_mass(f: Field) -> float:
    return float(f.values[1:-1, 1:-1].sum() * f.grid.dx * f.grid.dy)


def support_radius(f: Field, threshold: float | None = None) -> float:
    if threshold is None:
        threshold = 1e-12 * linf_norm(f)
    assert threshold >= 0
    mask = np.abs(f.values) > threshold
    if not mask.any():
        return 0.0
    x, y = f.grid.mesh()
    return float(np.hypot(x[mask], y[mask]).max())
