import numpy as np
import pytest

from hyperprey.grid import Field, GridSpec
from hyperprey.kernel import build_mollifier, sample_kernel


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_grid() -> GridSpec:
    # [-1, 1]^2 at dx = dy = 0.05
    return GridSpec.from_spacing(-1.0, 1.0, -1.0, 1.0, 0.05)


@pytest.fixture
def table_025(unit_grid):
    return sample_kernel(build_mollifier(0.25), unit_grid)


def compact_bump(g: GridSpec, radius: float, center=(0.0, 0.0), amplitude=1.0) -> Field:
    """Smooth, compactly supported amplitude * (1 - r^2 / R^2)^3."""
    cx, cy = center
    x, y = g.mesh()
    s = np.maximum(0.0, 1.0 - ((x - cx) ** 2 + (y - cy) ** 2) / radius**2)
    return Field(g, amplitude * s**3)


@pytest.fixture
def make_bump():
    return compact_bump
