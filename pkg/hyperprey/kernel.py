"""
Compactly supported mollifier eta(x) = eta_hat * (ell^2 - |x|^2)^3 on B(0, ell),
its sampled stencils and the constant K bounding the nonlocal velocity map.

eta is a polynomial in s = ell^2 - |x|^2 on its support, so every derivative is
closed form:
    grad eta      = -6 A s^2 x
    hess eta      = -6 A s^2 I + 24 A s x x^T
    d3 eta_{ijk}  = 24 A s (d_ij x_k + d_ik x_j + d_jk x_i) - 48 A x_i x_j x_k
with A = eta_hat. All of them vanish continuously at |x| = ell.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError, MeshTooCoarseError
from .grid import GridSpec

# smallest kernel radius, in cells, for the sampled convolution to be meaningful
MIN_CELLS_PER_RADIUS = 3


@dataclass(frozen=True)
class Mollifier:
    ell: float
    eta_hat: float

    def _s(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        s = self.ell * self.ell - (x * x + y * y)
        return s, s > 0

    def eta(self, x, y) -> np.ndarray:
        s, inside = self._s(x, y)
        return np.where(inside, self.eta_hat * s**3, 0.0)

    def grad(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        s, inside = self._s(x, y)
        coef = np.where(inside, -6.0 * self.eta_hat * s * s, 0.0)
        return coef * x, coef * y

    def hessian(self, x, y) -> np.ndarray:
        """Shape (..., 2, 2)."""
        s, inside = self._s(x, y)
        s = np.where(inside, s, 0.0)
        a = self.eta_hat
        pos = np.stack(np.broadcast_arrays(x, y), axis=-1).astype(np.float64)
        outer = pos[..., :, None] * pos[..., None, :]
        eye = np.eye(2)
        h = -6.0 * a * (s * s)[..., None, None] * eye + 24.0 * a * s[..., None, None] * outer
        return np.where(inside[..., None, None], h, 0.0)

    def third(self, x, y) -> np.ndarray:
        """Shape (..., 2, 2, 2)."""
        s, inside = self._s(x, y)
        s = np.where(inside, s, 0.0)
        a = self.eta_hat
        pos = np.stack(np.broadcast_arrays(x, y), axis=-1).astype(np.float64)
        eye = np.eye(2)
        sym = (
            np.einsum("ij,...k->...ijk", eye, pos)
            + np.einsum("ik,...j->...ijk", eye, pos)
            + np.einsum("jk,...i->...ijk", eye, pos)
        )
        cube = np.einsum("...i,...j,...k->...ijk", pos, pos, pos)
        t = 24.0 * a * s[..., None, None, None] * sym - 48.0 * a * cube
        return np.where(inside[..., None, None, None], t, 0.0)

    def grad_laplacian(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        # contraction of the third derivative: (24 A s (n + 2) - 48 A r^2) x with n = 2
        s, inside = self._s(x, y)
        r2 = self.ell * self.ell - s
        coef = np.where(inside, self.eta_hat * (96.0 * s - 48.0 * r2), 0.0)
        return coef * x, coef * y


def build_mollifier(ell: float) -> Mollifier:
    if not ell > 0:
        raise InvalidParameterError(f"Kernel radius must be positive; got ell={ell}")
    # int_{R^2} (ell^2 - |x|^2)^3 dx = pi ell^8 / 4
    return Mollifier(ell=float(ell), eta_hat=4.0 / (math.pi * ell**8))


@dataclass(frozen=True, eq=False)
class KernelTable:
    grid: GridSpec
    radius_cells: Tuple[int, int]
    weights_eta: np.ndarray
    weights_grad_x: np.ndarray
    weights_grad_y: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.weights_eta.shape


def check_mesh(m: Mollifier, g: GridSpec):
    h = max(g.dx, g.dy)
    if m.ell < MIN_CELLS_PER_RADIUS * h * (1 - 1e-12):
        raise MeshTooCoarseError(
            f"Mesh too coarse for the kernel: ell={m.ell:g} < "
            f"{MIN_CELLS_PER_RADIUS}*max(dx, dy)={MIN_CELLS_PER_RADIUS * h:g}"
        )


def sample_kernel(m: Mollifier, g: GridSpec) -> KernelTable:
    check_mesh(m, g)
    dx, dy = g.dx, g.dy
    rx = int(math.floor(m.ell / dx + 1e-9))
    ry = int(math.floor(m.ell / dy + 1e-9))
    # offsets are integer multiples of the cell size, so +/- pairs are exact negatives
    ox = np.arange(-rx, rx + 1) * dx
    oy = np.arange(-ry, ry + 1) * dy
    px, py = np.meshgrid(ox, oy, indexing="ij")
    area = dx * dy

    raw_eta = m.eta(px, py) * area
    weights_eta = raw_eta / raw_eta.sum()
    gx, gy = m.grad(px, py)
    weights_grad_x = gx * area
    weights_grad_y = gy * area
    logging.debug(
        f"Sampled kernel ell={m.ell:g} on {2 * rx + 1}x{2 * ry + 1} stencil; "
        f"raw mass={raw_eta.sum():.6f}"
    )
    return KernelTable(
        grid=g,
        radius_cells=(rx, ry),
        weights_eta=weights_eta,
        weights_grad_x=weights_grad_x,
        weights_grad_y=weights_grad_y,
    )


# coefficient in front of |grad eta|_{W^{2,1}} among the candidates for K
_W21_COEF = 48.0 / (25.0 * math.sqrt(5.0))


@dataclass(frozen=True)
class KernelNorms:
    kappa: float
    grad_l1: float
    hess_l1: float
    third_l1: float
    grad_sup: float
    hess_sup: float
    grad_eta_W21: float
    grad_eta_W1inf: float
    candidates: Tuple[float, float, float, float]
    K: float

    def C_of(self, xi: float) -> float:
        return self.K * (1.0 + self.K * xi)

    def dump(self) -> Dict:
        return asdict(self)


def _radial_profiles(m: Mollifier, r: np.ndarray) -> Dict[str, np.ndarray]:
    # the norms used here are rotation invariant, so sampling along the x-axis suffices
    zero = np.zeros_like(r)
    gx, gy = m.grad(r, zero)
    hess = m.hessian(r, zero)
    third = m.third(r, zero)
    return {
        # Euclidean norm on vectors, operator norm on matrices, Frobenius on the 3-tensor
        "grad": np.hypot(gx, gy),
        "hess": np.linalg.norm(hess, ord=2, axis=(-2, -1)),
        "third": np.sqrt((third * third).sum(axis=(-3, -2, -1))),
    }


def compute_kernel_norms(
    m: Mollifier, kappa: float, quad_points: int = 4096
) -> KernelNorms:
    if quad_points < 64:
        raise InvalidParameterError(f"quad_points must be >= 64; got {quad_points}")
    if kappa < 0:
        raise InvalidParameterError(f"kappa must be non-negative; got {kappa}")
    r = np.linspace(0.0, m.ell, quad_points + 1)
    profiles = _radial_profiles(m, r)

    def radial_l1(profile: np.ndarray) -> float:
        return float(2.0 * math.pi * integrate.simpson(profile * r, x=r))

    grad_l1 = radial_l1(profiles["grad"])
    hess_l1 = radial_l1(profiles["hess"])
    third_l1 = radial_l1(profiles["third"])
    grad_sup = float(profiles["grad"].max())
    hess_sup = float(profiles["hess"].max())

    w21 = grad_l1 + hess_l1 + third_l1
    w1inf = max(grad_sup, hess_sup)
    candidates = (
        2.0 * kappa * w21,
        2.0 * kappa * w1inf,
        3.0 * w1inf,
        _W21_COEF * w21,
    )
    norms = KernelNorms(
        kappa=float(kappa),
        grad_l1=grad_l1,
        hess_l1=hess_l1,
        third_l1=third_l1,
        grad_sup=grad_sup,
        hess_sup=hess_sup,
        grad_eta_W21=w21,
        grad_eta_W1inf=w1inf,
        candidates=candidates,
        K=max(candidates),
    )
    logging.debug(f"Kernel norms for ell={m.ell:g}, kappa={kappa:g}: {norms}")
    return norms
