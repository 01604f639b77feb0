import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from driver.presets import preset_pcp
from hyperprey.errors import InvalidParameterError
from hyperprey.grid import Field, interior_mass, l1_norm, linf_norm
from hyperprey.kernel import build_mollifier, sample_kernel
from hyperprey.solver import (
    HyperbolicStepConfig,
    ModelParams,
    SimState,
    SwapAsymmetryTracker,
    apply_boundary,
    run,
    step,
)
from hyperprey.velocity import Extension

PCP_PARAMS = dict(alpha=2.0, beta=1.0, gamma=1.0, delta=2.0, mu=0.5, kappa=1.0, ell=0.25)


def params(**overrides) -> ModelParams:
    return ModelParams(**{**PCP_PARAMS, **overrides})


class TestModelParams:
    @pytest.mark.parametrize(
        "bad",
        [
            dict(mu=0.0),
            dict(mu=-0.5),
            dict(ell=0.0),
            dict(beta=-1.0),
            dict(kappa=-1.0),
            dict(alpha=math.nan),
            dict(gamma=math.inf),
        ],
    )
    def test_rejects(self, bad):
        with pytest.raises(InvalidParameterError):
            params(**bad)

    def test_dump_and_str(self):
        p = params()
        assert p.dump()["delta"] == 2.0
        assert "mu=0.5" in str(p)


class TestApplyBoundary:
    def test_identity(self, unit_grid, rng):
        f0 = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        np.testing.assert_array_equal(apply_boundary(f0, f0).values, f0.values)

    def test_ring_reset_interior_kept(self, unit_grid, rng):
        f0 = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        f = f0.with_values(f0.values + 1.0)
        out = apply_boundary(f, f0).values
        np.testing.assert_array_equal(out[0, :], f0.values[0, :])
        np.testing.assert_array_equal(out[:, -1], f0.values[:, -1])
        np.testing.assert_array_equal(out[1:-1, 1:-1], f.values[1:-1, 1:-1])

    def test_idempotent(self, unit_grid, rng):
        f0 = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        f = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        once = apply_boundary(f, f0)
        np.testing.assert_array_equal(apply_boundary(once, f0).values, once.values)


class TestStep:
    def test_zero_is_a_fixed_point(self, unit_grid, table_025):
        s = SimState.initial(Field.zeros(unit_grid), Field.zeros(unit_grid))
        for _ in range(3):
            s = step(s, params(), table_025)
            assert s.u.max() == 0.0 and s.w.max() == 0.0
        assert s.step_index == 3
        assert s.t == pytest.approx(3 * 0.45 * unit_grid.dx)

    def test_decoupled_heat_conserves_prey_mass(self, unit_grid, table_025, make_bump):
        w0 = make_bump(unit_grid, 0.3, center=(0.1, -0.1))
        s = SimState.initial(Field.zeros(unit_grid), w0)
        p = params(gamma=0.0, delta=0.0, mu=0.01)
        m0 = interior_mass(w0)
        for _ in range(4):
            s = step(s, p, table_025)
            assert interior_mass(s.w) == pytest.approx(m0, rel=1e-12)
        assert s.u.max() == 0.0
        assert linf_norm(s.w) < linf_norm(w0)

    def test_lands_on_stop(self, unit_grid, table_025, make_bump):
        s = SimState.initial(make_bump(unit_grid, 0.3), Field.constant(unit_grid, 0.2))
        s = step(s, params(), table_025, t_stop=0.005)
        assert s.t == 0.005

    def test_boundary_ring_pinned(self, unit_grid, table_025, rng):
        u0 = Field(unit_grid, rng.uniform(size=unit_grid.shape))
        w0 = Field(unit_grid, 0.2 + rng.uniform(size=unit_grid.shape))
        s = SimState.initial(u0, w0)
        for _ in range(3):
            s = step(s, params(), table_025, audit=True)
        ring = np.ones(unit_grid.shape, dtype=bool)
        ring[1:-1, 1:-1] = False
        np.testing.assert_array_equal(s.u.values[ring], u0.values[ring])
        np.testing.assert_array_equal(s.w.values[ring], w0.values[ring])

    def test_sweep_order_alternates(self, unit_grid, table_025, make_bump):
        # two single steps from states differing only in step parity differ
        u0 = make_bump(unit_grid, 0.4, center=(0.2, 0.1))
        w0 = make_bump(unit_grid, 0.5, center=(-0.1, 0.2))
        s = SimState.initial(u0, w0)
        # without predation the prey update does not see u
        p = params(delta=0.0)
        even = step(s, p, table_025)
        odd = step(replace(s, step_index=1), p, table_025)
        assert not np.array_equal(even.u.values, odd.u.values)
        np.testing.assert_array_equal(even.w.values, odd.w.values)

    def test_pcp_step_is_deterministic(self):
        cfg = preset_pcp()
        u_fn, w_fn = cfg.profiles()
        u0 = Field.from_function(cfg.grid, u_fn)
        w0 = Field.from_function(cfg.grid, w_fn)
        table = sample_kernel(build_mollifier(cfg.params.ell), cfg.grid)
        ext = Extension.frozen(w0, table.radius_cells, profile=w_fn)
        a = step(SimState.initial(u0, w0), cfg.params, table, extension=ext)
        b = step(SimState.initial(u0, w0), cfg.params, table, extension=ext)
        assert a.t == b.t
        np.testing.assert_array_equal(a.u.values, b.u.values)
        np.testing.assert_array_equal(a.w.values, b.w.values)


class TestRun:
    def test_single_step(self, unit_grid, table_025):
        s0 = SimState.initial(Field.zeros(unit_grid), Field.zeros(unit_grid))
        dt_h = 0.45 * unit_grid.dx
        s, series = run(s0, params(), table_025, dt_h)
        assert s.step_index == 1
        assert s.t == dt_h
        assert len(series) == 2

    def test_zero_run(self, unit_grid, table_025):
        s0 = SimState.initial(Field.zeros(unit_grid), Field.zeros(unit_grid))
        s, series = run(s0, params(), table_025, 1.0)
        assert s.t == 1.0
        assert s.u.max() == 0.0 and s.w.max() == 0.0
        df = series.to_frame()
        assert (df[["l1_u", "linf_u", "l1_w", "linf_w", "tv_u"]] == 0).all().all()
        assert series.all_ok()

    def test_observers_and_stops(self, unit_grid, table_025, make_bump):
        s0 = SimState.initial(make_bump(unit_grid, 0.3), Field.constant(unit_grid, 0.2))
        seen = []
        s, series = run(
            s0,
            params(),
            table_025,
            0.1,
            [lambda st: seen.append(st.t)],
            stops=[0.05, 0.0731, 0.5],
        )
        assert seen[0] == 0.0
        assert 0.05 in seen and 0.0731 in seen
        assert seen[-1] == 0.1 == s.t
        assert len(seen) == len(series) == s.step_index + 1
        assert list(series.to_frame()["t"]) == seen

    def test_cfl_number_changes_step_count(self, unit_grid, table_025):
        s0 = SimState.initial(Field.zeros(unit_grid), Field.zeros(unit_grid))
        coarse, _ = run(s0, params(), table_025, 0.09, hcfg=HyperbolicStepConfig(0.9))
        fine, _ = run(s0, params(), table_025, 0.09, hcfg=HyperbolicStepConfig(0.45))
        assert coarse.step_index == 2
        assert fine.step_index == 4

    def test_t_end_must_be_ahead(self, unit_grid, table_025):
        s0 = SimState.initial(Field.zeros(unit_grid), Field.zeros(unit_grid))
        with pytest.raises(InvalidParameterError):
            run(s0, params(), table_025, 0.0)

    def test_predators_gain_mass_on_preys(self, unit_grid, table_025, make_bump):
        # predators sitting on a dense prey patch grow, the patch is eaten
        u0 = make_bump(unit_grid, 0.3)
        w0 = Field.constant(unit_grid, 2.0)
        s, _ = run(SimState.initial(u0, w0), params(gamma=0.0), table_025, 0.2)
        assert l1_norm(s.u) > l1_norm(u0)
        assert s.w.values[20, 20] < 2.0

    def test_swap_asymmetry_shrinks_with_dt(self, unit_grid, table_025, make_bump):
        # data and velocity are symmetric under x <-> y; only the sweep order breaks it
        u0 = make_bump(unit_grid, 0.4, center=(-0.3, -0.3))
        w0 = make_bump(unit_grid, 0.4, center=(0.3, 0.3), amplitude=2.0)
        s0 = SimState.initial(u0, w0)
        worst = []
        for cfl in (0.45, 0.1125):
            tracker = SwapAsymmetryTracker()
            run(s0, params(), table_025, 0.1, [tracker], hcfg=HyperbolicStepConfig(cfl))
            assert tracker.values[0] == 0.0
            worst.append(tracker.worst)
        assert worst[0] > 0
        assert worst[1] < 0.5 * worst[0]

    def test_swap_asymmetry_is_logged(self, unit_grid, table_025, make_bump, caplog):
        u0 = make_bump(unit_grid, 0.4, center=(-0.3, -0.3))
        w0 = make_bump(unit_grid, 0.4, center=(0.3, 0.3))
        with caplog.at_level(logging.INFO):
            run(SimState.initial(u0, w0), params(), table_025, 0.05)
        assert "diagonal-swap asymmetry" in caplog.text

    def test_no_swap_diagnostic_on_asymmetric_data(self, unit_grid, table_025, make_bump, caplog):
        u0 = make_bump(unit_grid, 0.4, center=(-0.3, 0.1))
        w0 = make_bump(unit_grid, 0.4, center=(0.3, 0.3))
        with caplog.at_level(logging.INFO):
            run(SimState.initial(u0, w0), params(), table_025, 0.05)
        assert "diagonal-swap asymmetry" not in caplog.text
