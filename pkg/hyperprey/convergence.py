"""Solver-against-oracle refinement studies on the decoupled subproblems."""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from .grid import Field, GridSpec, l1_norm
from .oracles import (
    HeatKernelOracle,
    constant_coefficient_transport,
    gaussian_heat_solution,
    grad_heat_kernel_l1,
)
from .solver.coupling import apply_boundary
from .solver.hyperbolic import (
    HyperbolicStepConfig,
    cfl_dt,
    lax_friedrichs_sweep,
    source_rk2,
)
from .solver.parabolic import (
    ParabolicStepConfig,
    diffusion_step,
    parabolic_dt,
    source_euler,
)
from .velocity import VelocityField

DEFAULT_DXS = (0.04, 0.02, 0.01)


@dataclass
class ConvergenceStudy:
    name: str
    dxs: List[float]
    errors: List[float]
    steps: List[int]

    @property
    def orders(self) -> List[float]:
        # empirical order between successive meshes
        pairs = list(zip(self.dxs, self.errors))
        return [
            math.log(e0 / e1) / math.log(h0 / h1)
            for (h0, e0), (h1, e1) in zip(pairs, pairs[1:])
        ]

    @property
    def min_order(self) -> float:
        return min(self.orders)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "dx": self.dxs,
                "steps": self.steps,
                "l1_error": self.errors,
                "order": [float("nan")] + self.orders,
            }
        )


def _gaussian_bump(sigma: float, center: Tuple[float, float] = (0.0, 0.0)):
    cx, cy = center

    def profile(x, y):
        return np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sigma**2))

    return profile


def parabolic_study(
    dxs: Sequence[float] = DEFAULT_DXS,
    *,
    sigma0: float = 0.2,
    mu: float = 0.5,
    t_end: float = 0.05,
    a: float = 0.0,
    half_width: float = 1.0,
    cfg: ParabolicStepConfig = ParabolicStepConfig(),
) -> ConvergenceStudy:
    """Explicit diffusion (plus Euler source at constant rate a) against the heat oracle.

    The boundary ring follows the exact solution, so only the scheme's own
    error is measured.
    """
    errors, steps = [], []
    for dx in dxs:
        g = GridSpec.from_spacing(-half_width, half_width, -half_width, half_width, dx)
        x, y = g.mesh()

        def exact(t: float) -> Field:
            return Field(g, gaussian_heat_solution(sigma0, 1.0, mu, t, x, y, a=a))

        n = math.ceil(t_end / parabolic_dt(mu, g, cfg))
        dt = t_end / n
        zero_u = Field.zeros(g)
        w = exact(0.0)
        for k in range(n):
            w = diffusion_step(w, mu, dt)
            if a != 0:
                w = source_euler(w, zero_u, a, 0.0, dt)
            w = apply_boundary(w, exact((k + 1) * dt))
        err = l1_norm(w.with_values(w.values - exact(t_end).values))
        logging.debug(f"parabolic dx={dx:g}: {n} steps, L1 error {err:.4e}")
        errors.append(err)
        steps.append(n)
    return ConvergenceStudy("parabolic", list(dxs), errors, steps)


def hyperbolic_study(
    dxs: Sequence[float] = DEFAULT_DXS,
    *,
    c: Tuple[float, float] = (0.5, 0.25),
    b: float = -0.3,
    sigma: float = 0.35,
    t_end: float = 0.4,
    half_width: float = 2.0,
    cfg: HyperbolicStepConfig = HyperbolicStepConfig(),
) -> ConvergenceStudy:
    """Split Lax-Friedrichs with RK2 source against constant-coefficient transport."""
    u_init = _gaussian_bump(sigma)
    # b = alpha w - beta with w = 0 reduces to a pure decay at rate beta = -b
    alpha, beta = 0.0, -b
    errors, steps = [], []
    for dx in dxs:
        g = GridSpec.from_spacing(-half_width, half_width, -half_width, half_width, dx)
        x, y = g.mesh()

        def exact(t: float) -> Field:
            return Field(g, constant_coefficient_transport(u_init, c, b, t, x, y))

        vel = VelocityField(
            vx=Field.constant(g, c[0]),
            vy=Field.constant(g, c[1]),
            kappa=math.hypot(*c),
        )
        n = math.ceil(t_end / cfl_dt(vel, g, cfg))
        dt = t_end / n
        w = Field.zeros(g)
        u = exact(0.0)
        for k in range(n):
            order = ((vel.vx, "x"), (vel.vy, "y"))
            for comp, axis in order if k % 2 == 0 else order[::-1]:
                u = lax_friedrichs_sweep(u, comp, axis, dt)
            u = source_rk2(u, w, alpha, beta, dt)
            u = apply_boundary(u, exact((k + 1) * dt))
        err = l1_norm(u.with_values(u.values - exact(t_end).values))
        logging.debug(f"hyperbolic dx={dx:g}: {n} steps, L1 error {err:.4e}")
        errors.append(err)
        steps.append(n)
    return ConvergenceStudy("hyperbolic", list(dxs), errors, steps)


def heat_kernel_report(
    cases: Sequence[Tuple[float, float]] = ((0.5, 0.1), (1.0, 1.0)),
) -> pd.DataFrame:
    """Sampled mass and gradient L1 norm of the heat kernel against closed forms."""
    rows = []
    for mu, t in cases:
        oracle = HeatKernelOracle(mu)
        sigma = math.sqrt(2 * mu * t)
        half = 6 * sigma
        g = GridSpec.from_spacing(-half, half, -half, half, sigma / 10)
        quad = oracle.grad_l1_quadrature(t)
        closed = grad_heat_kernel_l1(mu, t)
        rows.append(
            {
                "mu": mu,
                "t": t,
                "sampled_l1": oracle.sampled_l1(t, g),
                "grad_l1_quad": quad,
                "grad_l1_closed": closed,
                "grad_rel_err": abs(quad - closed) / closed,
            }
        )
    return pd.DataFrame(rows)
