import logging
import math

import numpy as np
import pytest

from hyperprey.errors import InvalidParameterError, StepRejectedError
from hyperprey.grid import Field, GridSpec, interior_mass
from hyperprey.solver.parabolic import (
    ParabolicStepConfig,
    diffusion_step,
    parabolic_dt,
    source_euler,
)

STABLE = ParabolicStepConfig(safety=1.0)


class TestParabolicDt:
    def test_reference_mesh(self):
        g = GridSpec.from_spacing(-1.0, 1.0, -2.0, 2.0, 0.005)
        assert parabolic_dt(0.5, g, STABLE) == pytest.approx(1.25e-5)

    def test_scaling(self):
        g = GridSpec.from_spacing(-1.0, 1.0, -1.0, 1.0, 0.04)
        fine = GridSpec.from_spacing(-1.0, 1.0, -1.0, 1.0, 0.02)
        assert parabolic_dt(0.5, fine, STABLE) == pytest.approx(parabolic_dt(0.5, g, STABLE) / 4)
        assert parabolic_dt(1.0, g, STABLE) == pytest.approx(parabolic_dt(0.5, g, STABLE) / 2)

    def test_safety(self, unit_grid):
        assert parabolic_dt(0.5, unit_grid, ParabolicStepConfig(0.9)) == pytest.approx(
            0.9 * parabolic_dt(0.5, unit_grid, STABLE)
        )

    @pytest.mark.parametrize("mu", [0.0, -1.0])
    def test_non_positive_diffusivity(self, unit_grid, mu):
        with pytest.raises(InvalidParameterError):
            parabolic_dt(mu, unit_grid, STABLE)

    @pytest.mark.parametrize("safety", [0.0, 1.01])
    def test_bad_safety(self, safety):
        with pytest.raises(InvalidParameterError):
            ParabolicStepConfig(safety)


class TestDiffusionStep:
    def test_constant_unchanged(self, unit_grid):
        w = Field.constant(unit_grid, 0.2)
        out = diffusion_step(w, 0.5, parabolic_dt(0.5, unit_grid, STABLE))
        np.testing.assert_array_equal(out.values, w.values)

    def test_delta_mass(self, unit_grid):
        v = np.zeros(unit_grid.shape)
        v[20, 20] = 3.0
        w = Field(unit_grid, v)
        dt = parabolic_dt(0.5, unit_grid, STABLE)
        m0 = interior_mass(w)
        for _ in range(5):
            w = diffusion_step(w, 0.5, dt)
        assert interior_mass(w) == pytest.approx(m0, rel=1e-12)

    def test_maximum_principle(self, unit_grid, rng):
        w = Field(unit_grid, rng.uniform(0.5, 2.0, size=unit_grid.shape))
        lo, hi = w.min(), w.max()
        dt = parabolic_dt(0.5, unit_grid, STABLE)
        for _ in range(10):
            w = diffusion_step(w, 0.5, dt)
            assert lo - 1e-12 <= w.min() and w.max() <= hi + 1e-12

    def test_commutes_with_reflection(self, unit_grid, rng):
        w = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        dt = parabolic_dt(0.5, unit_grid, ParabolicStepConfig())
        flipped = diffusion_step(w.with_values(w.values[::-1, :]), 0.5, dt)
        np.testing.assert_allclose(
            flipped.values, diffusion_step(w, 0.5, dt).values[::-1, :], rtol=1e-14, atol=1e-15
        )

    def test_rejects_unstable_step(self, unit_grid):
        w = Field.constant(unit_grid, 1.0)
        with pytest.raises(StepRejectedError):
            diffusion_step(w, 0.5, 1.01 * parabolic_dt(0.5, unit_grid, STABLE))


class TestSourceEuler:
    def test_no_rates(self, unit_grid, rng):
        w = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        u = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        np.testing.assert_array_equal(source_euler(w, u, 0.0, 0.0, 0.1).values, w.values)

    def test_growth_factor(self, unit_grid):
        w = Field.constant(unit_grid, 0.2)
        out = source_euler(w, Field.zeros(unit_grid), 0.4, 24.0, 0.01)
        np.testing.assert_allclose(out.values, 0.2 * 1.004)

    def test_first_order_global_error(self, unit_grid):
        w0 = Field.constant(unit_grid, 1.0)
        u = Field.constant(unit_grid, 0.1)
        gamma, delta = 0.4, 2.0

        def err(dt: float) -> float:
            w = w0
            for _ in range(round(1.0 / dt)):
                w = source_euler(w, u, gamma, delta, dt)
            return abs(w.max() - math.exp(gamma - delta * 0.1))

        assert 1.9 < err(0.01) / err(0.005) < 2.1

    def test_warns_when_factor_may_turn_negative(self, unit_grid, caplog):
        w = Field.constant(unit_grid, 1.0)
        u = Field.constant(unit_grid, 10.0)
        with caplog.at_level(logging.WARNING):
            source_euler(w, u, 0.0, 24.0, 0.01)
        assert "may turn negative" in caplog.text
