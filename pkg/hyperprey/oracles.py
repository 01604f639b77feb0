"""
Closed-form and characteristics-based reference solutions for the two decoupled
subproblems:

    w_t - mu Lap w = a w         (heat kernel, constant a)
    u_t + div(c u) = b u         (integration along characteristics)

Oracles are evaluated pointwise; nothing here is gridded internally.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy import integrate, special

from .errors import InvalidParameterError
from .grid import GridSpec

ArrayLike = float | np.ndarray
VectorFn = Callable[[float, np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]
ScalarFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]
Profile = Callable[[np.ndarray, np.ndarray], np.ndarray]


def gaussian_heat_solution(
    sigma0: float,
    amplitude: float,
    mu: float,
    t: float,
    x: ArrayLike,
    y: ArrayLike,
    a: float = 0.0,
) -> np.ndarray:
    """Heat flow of amplitude * exp(-|x|^2 / (2 sigma0^2)), times e^{a t} for a constant rate a."""
    if not sigma0 > 0:
        raise InvalidParameterError(f"sigma0 must be positive; got {sigma0}")
    if not mu > 0 or t < 0:
        raise InvalidParameterError(f"Need mu > 0 and t >= 0; got mu={mu}, t={t}")
    s2 = sigma0 * sigma0 + 2.0 * mu * t
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return amplitude * (sigma0 * sigma0 / s2) * np.exp(-(x * x + y * y) / (2.0 * s2) + a * t)


@dataclass(frozen=True)
class HeatKernelOracle:
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidParameterError(f"Diffusivity must be positive; got mu={self.mu}")

    @property
    def J(self) -> float:
        # Gamma((n + 1) / 2) / Gamma(n / 2) for n = 2
        return float(special.gamma(1.5) / special.gamma(1.0))

    def _check_t(self, t: float):
        if not t > 0:
            raise InvalidParameterError(f"Heat kernel needs t > 0; got t={t}")

    def evaluate(self, t: float, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        self._check_t(t)
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        s = 4.0 * self.mu * t
        return np.exp(-(x * x + y * y) / s) / (math.pi * s)

    def gradient(self, t: float, x: ArrayLike, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        h = self.evaluate(t, x, y)
        coef = -h / (2.0 * self.mu * t)
        return coef * np.asarray(x), coef * np.asarray(y)

    def sampled_l1(self, t: float, g: GridSpec) -> float:
        x, y = g.mesh()
        return float(self.evaluate(t, x, y).sum() * g.cell_area)

    def grad_l1_quadrature(self, t: float) -> float:
        """Radial quadrature of |grad H(t)| over the plane."""
        self._check_t(t)

        def integrand(r: float) -> float:
            gx, _ = self.gradient(t, r, 0.0)
            return 2.0 * math.pi * r * abs(float(gx))

        scale = math.sqrt(4.0 * self.mu * t)
        value, _ = integrate.quad(integrand, 0.0, 40.0 * scale, epsabs=0, epsrel=1e-10, limit=200)
        return float(value)


def grad_heat_kernel_l1(mu: float, t: float) -> float:
    if not t > 0:
        raise InvalidParameterError(f"Heat kernel gradient norm needs t > 0; got t={t}")
    oracle = HeatKernelOracle(mu)
    return oracle.J / math.sqrt(mu * t)


def constant_coefficient_transport(
    u0: Profile,
    c: Tuple[float, float],
    B: float,
    t: float,
    x: ArrayLike,
    y: ArrayLike,
) -> np.ndarray:
    cx, cy = c
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return np.asarray(u0(x - t * cx, y - t * cy)) * math.exp(B * t)


class CharacteristicsOracle:
    """Solution of u_t + div(c u) = b u by tracing characteristics with fixed-step RK4.

    `c(t, x, y)` returns the two velocity components and `b(t, x, y)` the rate.
    Without `div_c`, the divergence of c is taken by central differences.
    """

    def __init__(
        self,
        c: VectorFn,
        b: ScalarFn | None = None,
        div_c: ScalarFn | None = None,
        substeps: int = 1000,
        fd_step: float = 1e-6,
    ):
        if substeps < 1:
            raise InvalidParameterError(f"substeps must be >= 1; got {substeps}")
        self.c = c
        self.b = b
        self.div_c = div_c
        self.substeps = substeps
        self.fd_step = fd_step

    def _divergence(self, t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.div_c is not None:
            return np.asarray(self.div_c(t, x, y), dtype=np.float64)
        h = self.fd_step
        cxp, _ = self.c(t, x + h, y)
        cxm, _ = self.c(t, x - h, y)
        _, cyp = self.c(t, x, y + h)
        _, cym = self.c(t, x, y - h)
        return (np.asarray(cxp) - np.asarray(cxm) + np.asarray(cyp) - np.asarray(cym)) / (
            2 * h
        )

    def _rhs(self, t: float, state: np.ndarray, with_rate: bool) -> np.ndarray:
        # state rows: x, y and the accumulated integral of (b - div c)
        x, y = state[0], state[1]
        cx, cy = self.c(t, x, y)
        rate = np.zeros_like(x)
        if with_rate:
            rate = rate - self._divergence(t, x, y)
            if self.b is not None:
                rate = rate + np.asarray(self.b(t, x, y), dtype=np.float64)
        parts = np.broadcast_arrays(
            np.asarray(cx, dtype=np.float64), np.asarray(cy, dtype=np.float64), rate
        )
        return np.stack(parts)

    def _integrate(
        self, t0: float, x0: ArrayLike, y0: ArrayLike, t1: float, with_rate: bool
    ) -> np.ndarray:
        x0, y0 = np.broadcast_arrays(
            np.asarray(x0, dtype=np.float64), np.asarray(y0, dtype=np.float64)
        )
        state = np.stack([x0, y0, np.zeros_like(x0)])
        h = (t1 - t0) / self.substeps
        if h == 0:
            return state
        for k in range(self.substeps):
            t = t0 + k * h
            k1 = self._rhs(t, state, with_rate)
            k2 = self._rhs(t + h / 2, state + h / 2 * k1, with_rate)
            k3 = self._rhs(t + h / 2, state + h / 2 * k2, with_rate)
            k4 = self._rhs(t + h, state + h * k3, with_rate)
            state = state + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        return state

    def flow(
        self, t0: float, x0: ArrayLike, y0: ArrayLike, t: float
    ) -> Tuple[np.ndarray, np.ndarray]:
        """X(t; t0, x0): position at time t of the characteristic through x0 at t0."""
        state = self._integrate(t0, x0, y0, t, with_rate=False)
        return state[0], state[1]

    def solution(
        self, u0: Profile, t: float, x: ArrayLike, y: ArrayLike, t0: float = 0.0
    ) -> np.ndarray:
        """u(t, x) = u0(X(t0; t, x)) * exp(int_{t0}^{t} (b - div c) along the path)."""
        # tracing backward accumulates the integral from t down to t0, hence the sign
        state = self._integrate(t, x, y, t0, with_rate=True)
        return np.asarray(u0(state[0], state[1])) * np.exp(-state[2])
