import logging
from dataclasses import dataclass

from ..errors import InvalidParameterError, StepRejectedError
from ..grid import Field, GridSpec


@dataclass(frozen=True)
class ParabolicStepConfig:
    # multiplier under the explicit-stability limit
    safety: float = 0.9

    def __post_init__(self):
        if not 0 < self.safety <= 1:
            raise InvalidParameterError(f"safety must be in (0, 1]; got {self.safety}")


def parabolic_dt(mu: float, g: GridSpec, cfg: ParabolicStepConfig) -> float:
    if not mu > 0:
        raise InvalidParameterError(f"Diffusivity must be positive; got mu={mu}")
    return cfg.safety / (2.0 * mu * (1.0 / g.dx**2 + 1.0 / g.dy**2))


def diffusion_step(w: Field, mu: float, dt: float) -> Field:
    """Forward Euler on the 5-point Laplacian, interior cells only."""
    assert dt > 0
    g = w.grid
    limit = parabolic_dt(mu, g, ParabolicStepConfig(safety=1.0))
    if dt > limit * (1 + 1e-12):
        raise StepRejectedError(
            f"Explicit diffusion unstable: dt={dt:g} > {limit:g} (mu={mu:g})"
        )
    v = w.values
    out = v.copy()
    lap = (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / g.dx**2 + (
        v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]
    ) / g.dy**2
    out[1:-1, 1:-1] = v[1:-1, 1:-1] + mu * dt * lap
    return w.with_values(out)


def source_euler(w: Field, u: Field, gamma: float, delta: float, dt: float) -> Field:
    assert dt > 0
    if dt * delta * u.max() > 1:
        logging.warning(
            f"Prey source factor may turn negative: dt*delta*max(u)={dt * delta * u.max():.3g}"
        )
    return w.with_values(w.values * (1.0 + dt * (gamma - delta * u.values)))
