"""Nonlocal predator velocity v(w) = kappa grad(w*eta) / sqrt(1 + |grad(w*eta)|^2)."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np
from scipy import signal

from .grid import Field, GridSpec, l1_norm, linf_norm
from .kernel import KernelNorms, KernelTable

Profile = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Extension:
    """Values assumed outside the grid when a convolution stencil reaches past it.

    `halo` is the frozen datum on the grid padded by (rx, ry) cells per side;
    None means the field vanishes outside the domain.
    """

    halo: np.ndarray | None = None
    pad: Tuple[int, int] = (0, 0)

    @classmethod
    def zero(cls) -> "Extension":
        return cls()

    @classmethod
    def frozen(
        cls,
        w0: Field,
        radius_cells: Tuple[int, int],
        profile: Profile | None = None,
    ) -> "Extension":
        """Freeze the initial prey datum outside the domain.

        With an analytic `profile` the datum is evaluated on the padded cell
        centers; otherwise the boundary ring of `w0` is replicated outward.
        """
        rx, ry = radius_cells
        g = w0.grid
        if profile is not None:
            xs = g.x_min + (np.arange(-rx, g.nx + rx) + 0.5) * g.dx
            ys = g.y_min + (np.arange(-ry, g.ny + ry) + 0.5) * g.dy
            px, py = np.meshgrid(xs, ys, indexing="ij")
            halo = np.array(
                np.broadcast_to(profile(px, py), px.shape), dtype=np.float64
            )
        else:
            halo = np.pad(w0.values, ((rx, rx), (ry, ry)), mode="edge")
        halo.setflags(write=False)
        return cls(halo=halo, pad=(rx, ry))

    def padded(self, values: np.ndarray, rx: int, ry: int) -> np.ndarray:
        if self.halo is None:
            return np.pad(values, ((rx, rx), (ry, ry)), mode="constant")
        hx, hy = self.pad
        assert hx >= rx and hy >= ry, "extension halo narrower than the stencil"
        nx, ny = values.shape
        out = self.halo[hx - rx : hx + nx + rx, hy - ry : hy + ny + ry].copy()
        out[rx : rx + nx, ry : ry + ny] = values
        return out


@dataclass(frozen=True, eq=False)
class VelocityField:
    vx: Field
    vy: Field
    kappa: float

    def speed(self) -> np.ndarray:
        return np.hypot(self.vx.values, self.vy.values)

    def max_component(self) -> float:
        return float(max(np.abs(self.vx.values).max(), np.abs(self.vy.values).max()))


def convolve(w: Field, stencil: np.ndarray, boundary: Extension | None = None) -> Field:
    boundary = Extension.zero() if boundary is None else boundary
    sx, sy = stencil.shape
    assert sx % 2 == 1 and sy % 2 == 1, "stencil must be centered"
    rx, ry = sx // 2, sy // 2
    padded = boundary.padded(w.values, rx, ry)
    # direct (non-FFT) summation with a fixed traversal order per cell
    out = signal.convolve2d(padded, stencil, mode="valid")
    return w.with_values(out)


def nonlocal_velocity(
    w: Field,
    table: KernelTable,
    kappa: float,
    boundary: Extension | None = None,
) -> VelocityField:
    # grad(w * eta) = w * grad(eta), with grad(eta) sampled analytically
    gx = convolve(w, table.weights_grad_x, boundary).values
    gy = convolve(w, table.weights_grad_y, boundary).values
    denom = np.sqrt(1.0 + gx * gx + gy * gy)
    return VelocityField(
        vx=w.with_values(kappa * gx / denom),
        vy=w.with_values(kappa * gy / denom),
        kappa=float(kappa),
    )


def velocity_jacobian(v: VelocityField) -> np.ndarray:
    """Central-difference Jacobian, shape (nx, ny, 2, 2): [..., i, j] = d v_i / d x_j."""
    g = v.vx.grid
    dvx_dx, dvx_dy = np.gradient(v.vx.values, g.dx, g.dy)
    dvy_dx, dvy_dy = np.gradient(v.vy.values, g.dx, g.dy)
    return np.stack(
        [np.stack([dvx_dx, dvx_dy], axis=-1), np.stack([dvy_dx, dvy_dy], axis=-1)],
        axis=-2,
    )


def velocity_divergence(v: VelocityField) -> np.ndarray:
    g = v.vx.grid
    return (
        np.gradient(v.vx.values, g.dx, axis=0) + np.gradient(v.vy.values, g.dy, axis=1)
    )


CONDITION_NAMES = (
    "v_sup",  # |v(w)|_inf <= K |w|_1
    "grad_v_sup",  # |grad v(w)|_inf <= K |w|_inf
    "v_lipschitz",  # |v(w1) - v(w2)|_inf <= K |w1 - w2|_1
    "grad_div_v_l1",  # |grad div v(w)|_1 <= C(|w|_1) |w|_1
    "div_lipschitz",  # |div(v(w1) - v(w2))|_1 <= C(|w2|_inf) |w1 - w2|_1
)


@dataclass
class VConditionAudit:
    K: float
    trials: int
    tol_discrete: float
    worst_ratios: Dict[str, float] = field(
        default_factory=lambda: {name: 0.0 for name in CONDITION_NAMES}
    )

    @property
    def passed(self) -> bool:
        return all(r <= 1 + self.tol_discrete for r in self.worst_ratios.values())

    def record(self, name: str, lhs: float, rhs: float):
        if lhs == 0:
            ratio = 0.0
        elif rhs == 0:
            ratio = float("inf")
        else:
            ratio = lhs / rhs
        if ratio > self.worst_ratios[name]:
            self.worst_ratios[name] = ratio

    def dump(self) -> Dict:
        return {**asdict(self), "passed": self.passed}


def _random_fields(
    rng: np.random.Generator, g: GridSpec, margin: Tuple[int, int], count: int
) -> List[Field]:
    """Nonnegative test fields supported away from the boundary."""
    x, y = g.mesh()
    mx, my = margin
    inner = np.zeros(g.shape, dtype=bool)
    inner[mx : g.nx - mx, my : g.ny - my] = True
    xs, ys = x[inner], y[inner]
    fields = []
    for k in range(count):
        kind = k % 3
        if kind == 0:  # smooth bump
            cx, cy = rng.choice(xs), rng.choice(ys)
            sigma = rng.uniform(2, 10) * max(g.dx, g.dy)
            vals = rng.uniform(0.1, 5) * np.exp(
                -((x - cx) ** 2 + (y - cy) ** 2) / (2 * sigma**2)
            )
        elif kind == 1:  # rough noise
            vals = rng.uniform(0, rng.uniform(0.1, 3), size=g.shape)
        else:  # a few spikes
            vals = np.zeros(g.shape)
            idx = np.flatnonzero(inner)
            picks = rng.choice(idx, size=rng.integers(1, 6), replace=False)
            vals.flat[picks] = rng.uniform(0.5, 5, size=picks.size) / g.cell_area
        fields.append(Field(g, np.where(inner, vals, 0.0)))
    return fields


def audit_v_condition(
    table: KernelTable,
    norms: KernelNorms,
    trials: int,
    rng_seed: int,
    tol_discrete: float = 0.05,
) -> VConditionAudit:
    assert trials >= 1
    g = table.grid
    kappa = norms.kappa
    K = norms.K
    rx, ry = table.radius_cells
    rng = np.random.default_rng(rng_seed)
    # one-sided differences at the edge are not part of the continuum statement
    ex, ey = 2, 2
    window = (slice(ex, g.nx - ex), slice(ey, g.ny - ey))
    area = g.cell_area

    audit = VConditionAudit(K=K, trials=trials, tol_discrete=tol_discrete)
    fields = [Field.zeros(g)] + _random_fields(rng, g, (rx + 2, ry + 2), trials - 1)
    for trial, w1 in enumerate(fields):
        # pair each field with a random partner, and once with itself
        w2 = w1 if trial == 1 else fields[int(rng.integers(0, len(fields)))]
        v1 = nonlocal_velocity(w1, table, kappa)
        v2 = nonlocal_velocity(w2, table, kappa)
        l1_w1 = l1_norm(w1)
        diff_l1 = l1_norm(w1.with_values(w1.values - w2.values))

        audit.record("v_sup", float(v1.speed()[window].max()), K * l1_w1)

        jac = velocity_jacobian(v1)[window]
        grad_sup = float(np.linalg.norm(jac, ord=2, axis=(-2, -1)).max())
        audit.record("grad_v_sup", grad_sup, K * linf_norm(w1))

        dv = np.hypot(v1.vx.values - v2.vx.values, v1.vy.values - v2.vy.values)
        audit.record("v_lipschitz", float(dv[window].max()), K * diff_l1)

        div1 = velocity_divergence(v1)
        gdx, gdy = np.gradient(div1, g.dx, g.dy)
        grad_div_l1 = float(np.hypot(gdx, gdy)[window].sum() * area)
        audit.record("grad_div_v_l1", grad_div_l1, norms.C_of(l1_w1) * l1_w1)

        ddiv = div1 - velocity_divergence(v2)
        ddiv_l1 = float(np.abs(ddiv[window]).sum() * area)
        audit.record(
            "div_lipschitz", ddiv_l1, norms.C_of(linf_norm(w2)) * diff_l1
        )
    logging.info(
        f"Condition (v) audit over {trials} trials: K={K:g}, worst ratios="
        + ", ".join(f"{k}={v:.3g}" for k, v in audit.worst_ratios.items())
    )
    return audit
