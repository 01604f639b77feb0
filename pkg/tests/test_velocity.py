import numpy as np
import pytest

import hyperprey.velocity as velocity
from hyperprey.grid import Field
from hyperprey.kernel import build_mollifier, compute_kernel_norms
from hyperprey.velocity import (
    CONDITION_NAMES,
    Extension,
    VConditionAudit,
    VelocityField,
    audit_v_condition,
    convolve,
    nonlocal_velocity,
    velocity_divergence,
)


class TestConvolve:
    def test_zero(self, unit_grid, table_025):
        out = convolve(Field.zeros(unit_grid), table_025.weights_eta)
        assert np.array_equal(out.values, np.zeros(unit_grid.shape))

    def test_partition_of_unity(self, unit_grid, table_025):
        w = Field.constant(unit_grid, 1.0)
        ext = Extension.frozen(w, table_025.radius_cells)
        out = convolve(w, table_025.weights_eta, ext)
        np.testing.assert_allclose(out.values, 1.0, rtol=1e-13)

    def test_zero_extension_loses_mass_at_the_edge(self, unit_grid, table_025):
        w = Field.constant(unit_grid, 1.0)
        out = convolve(w, table_025.weights_eta)
        assert out.values[0, 0] < 0.5
        assert out.values[20, 20] == pytest.approx(1.0)

    @pytest.mark.parametrize("which", ["weights_eta", "weights_grad_x"])
    def test_single_cell_against_double_loop(self, unit_grid, table_025, which):
        g = unit_grid
        stencil = getattr(table_025, which)
        rx, ry = table_025.radius_cells
        i0, j0 = 17, 22
        v = np.zeros(g.shape)
        v[i0, j0] = 1.0 / g.cell_area
        out = convolve(Field(g, v), stencil).values

        expected = np.zeros(g.shape)
        for i in range(g.nx):
            for j in range(g.ny):
                a, b = i - i0, j - j0
                if abs(a) <= rx and abs(b) <= ry:
                    expected[i, j] = stencil[rx + a, ry + b] / g.cell_area
        np.testing.assert_allclose(out, expected, rtol=1e-13, atol=1e-13)


class TestExtension:
    def test_frozen_profile_outside(self, unit_grid):
        def profile(x, y):
            return 1.0 + x + 2 * y

        w0 = Field.from_function(unit_grid, profile)
        ext = Extension.frozen(w0, (3, 2), profile=profile)
        padded = ext.padded(w0.values, 3, 2)
        assert padded.shape == (unit_grid.nx + 6, unit_grid.ny + 4)
        # the corner cell outside the domain sits at (-1 - 2.5 dx, -1 - 1.5 dy)
        assert padded[0, 0] == pytest.approx(profile(-1 - 2.5 * 0.05, -1 - 1.5 * 0.05))
        np.testing.assert_array_equal(padded[3:-3, 2:-2], w0.values)

    def test_frozen_edge_padding(self, unit_grid, rng):
        w0 = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        ext = Extension.frozen(w0, (2, 2))
        padded = ext.padded(w0.values, 1, 2)
        assert padded[0, 5] == w0.values[0, 3]
        assert padded[-1, -1] == w0.values[-1, -1]

    def test_interior_comes_from_current_field(self, unit_grid):
        w0 = Field.constant(unit_grid, 0.2)
        ext = Extension.frozen(w0, (5, 5))
        current = np.full(unit_grid.shape, 3.0)
        padded = ext.padded(current, 5, 5)
        assert padded[0, 0] == 0.2
        assert padded[5, 5] == 3.0


class TestNonlocalVelocity:
    def test_zero(self, unit_grid, table_025):
        v = nonlocal_velocity(Field.zeros(unit_grid), table_025, 1.0)
        assert v.max_component() == 0.0

    def test_constant_away_from_boundary(self, unit_grid, table_025):
        v = nonlocal_velocity(
            Field.constant(unit_grid, 0.7), table_025, 1.0, Extension.zero()
        )
        r = table_025.radius_cells[0]
        inner = v.speed()[r:-r, r:-r]
        assert inner.max() < 1e-12

    def test_constant_with_frozen_extension(self, unit_grid, table_025):
        w = Field.constant(unit_grid, 0.2)
        ext = Extension.frozen(w, table_025.radius_cells)
        v = nonlocal_velocity(w, table_025, 1.0, ext)
        assert v.speed().max() < 1e-12

    def test_points_towards_the_peak(self, unit_grid, table_025):
        g = unit_grid
        w = Field.from_function(g, lambda x, y: np.exp(-(x**2 + y**2) / (2 * 0.3**2)))
        v = nonlocal_velocity(w, table_025, 1.0)
        x, y = g.mesh()
        radial = x * v.vx.values + y * v.vy.values
        away = np.hypot(x, y) > 0.1
        assert (radial[away] < 0).all()

    def test_speed_cap(self, unit_grid, table_025, rng):
        for scale in (1e-3, 1.0, 1e6):
            w = Field(unit_grid, scale * rng.uniform(size=unit_grid.shape))
            v = nonlocal_velocity(w, table_025, 0.8)
            # the normalization caps the speed at kappa, up to one rounding
            assert v.speed().max() <= 0.8 * (1 + 1e-12)

    def test_translation_equivariance(self, unit_grid, table_025, make_bump):
        w = make_bump(unit_grid, 0.2, center=(-0.1, 0.05))
        shifted = Field(unit_grid, np.roll(w.values, 1, axis=0))
        v = nonlocal_velocity(w, table_025, 1.0)
        vs = nonlocal_velocity(shifted, table_025, 1.0)
        r = table_025.radius_cells[0] + 1
        np.testing.assert_allclose(
            vs.vx.values[r + 1 : -r, r:-r],
            v.vx.values[r : -r - 1, r:-r],
            rtol=1e-13,
            atol=1e-15,
        )

    def test_reflection_equivariance(self, unit_grid, table_025):
        g = unit_grid
        w = Field.from_function(
            g, lambda x, y: np.exp(-(x**2) / 0.1 - (y - 0.2) ** 2 / 0.05) * (1 + x**2)
        )
        v = nonlocal_velocity(w, table_025, 1.0)
        # even in x: vx odd, vy even
        np.testing.assert_allclose(v.vx.values, -v.vx.values[::-1, :], atol=1e-12)
        np.testing.assert_allclose(v.vy.values, v.vy.values[::-1, :], atol=1e-12)

    def test_divergence_of_linear_field(self, unit_grid):
        v = VelocityField(
            vx=Field.from_function(unit_grid, lambda x, y: 2 * x),
            vy=Field.from_function(unit_grid, lambda x, y: -0.5 * y),
            kappa=1.0,
        )
        np.testing.assert_allclose(velocity_divergence(v), 1.5, rtol=1e-10)


class TestAudit:
    def test_record(self):
        audit = VConditionAudit(K=10.0, trials=1, tol_discrete=0.05)
        assert set(audit.worst_ratios) == set(CONDITION_NAMES)
        audit.record("v_lipschitz", 0.0, 0.0)
        assert audit.worst_ratios["v_lipschitz"] == 0.0
        audit.record("v_sup", 2.0, 4.0)
        audit.record("v_sup", 1.0, 4.0)
        assert audit.worst_ratios["v_sup"] == 0.5
        assert audit.passed
        audit.record("grad_v_sup", 1.0, 0.0)
        assert audit.worst_ratios["grad_v_sup"] == float("inf")
        assert not audit.passed

    def test_zero_trial(self, unit_grid, table_025):
        norms = compute_kernel_norms(build_mollifier(0.25), 1.0)
        # a single trial audits the zero field
        audit = audit_v_condition(table_025, norms, trials=1, rng_seed=0)
        for name in ("v_sup", "grad_v_sup", "grad_div_v_l1"):
            assert audit.worst_ratios[name] == 0.0
        assert audit.passed

    def test_unit_mass_spike(self, unit_grid, table_025):
        norms = compute_kernel_norms(build_mollifier(0.25), 1.0)
        v = np.zeros(unit_grid.shape)
        v[20, 20] = 1.0 / unit_grid.cell_area
        vel = nonlocal_velocity(Field(unit_grid, v), table_025, 1.0)
        assert vel.speed().max() <= norms.K

    def test_small_audit_passes_and_is_deterministic(self, table_025):
        norms = compute_kernel_norms(build_mollifier(0.25), 1.0)
        a = audit_v_condition(table_025, norms, trials=12, rng_seed=3)
        b = audit_v_condition(table_025, norms, trials=12, rng_seed=3)
        assert a.passed
        assert a.worst_ratios == b.worst_ratios
        assert max(a.worst_ratios.values()) > 0
        assert a.dump()["passed"] is True

    def test_every_field_is_audited(self, table_025, monkeypatch):
        norms = compute_kernel_norms(build_mollifier(0.25), 1.0)
        generated, seen = [], []
        make_fields = velocity._random_fields
        evaluate = velocity.nonlocal_velocity

        def recording_fields(*args):
            generated.extend(make_fields(*args))
            return list(generated)

        def recording_velocity(w, *args, **kwargs):
            seen.append(w)
            return evaluate(w, *args, **kwargs)

        monkeypatch.setattr(velocity, "_random_fields", recording_fields)
        monkeypatch.setattr(velocity, "nonlocal_velocity", recording_velocity)
        audit_v_condition(table_025, norms, trials=6, rng_seed=1)
        assert len(generated) == 5
        # velocities come in (w1, w2) pairs; w1 runs over the zero field then every random one
        first = seen[0::2]
        assert len(first) == 6
        assert first[0].max() == 0.0
        assert all(a is b for a, b in zip(first[1:], generated))
