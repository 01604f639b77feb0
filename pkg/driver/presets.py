"""The two reference experiments: Predators Chasing Preys and the Dynamic Equilibrium."""

from typing import Callable, Dict

from hyperprey.grid import GridSpec
from hyperprey.solver.coupling import ModelParams

from .config import RunConfig
from .env import RESULTS_PATH

# desk-scale default; the reference figures use 0.005 (pcp) and 0.0075 (de)
DESK_DX = 0.02


def preset_pcp(dx: float = DESK_DX) -> RunConfig:
    return RunConfig(
        grid=GridSpec.from_spacing(-1.0, 1.0, -2.0, 2.0, dx),
        params=ModelParams(
            alpha=2.0, beta=1.0, gamma=1.0, delta=2.0, mu=0.5, kappa=1.0, ell=0.15
        ),
        scenario="pcp",
        # predators fill an ellipse below the origin
        u0="4 * ((2 * x)**2 + (1.25 * (y + 1))**2 <= 1)",
        # preys live in the upper half, away from the origin
        w0="1.5 * y * maximum(0, x**2 + y**2 - 0.25) * (y >= 0)",
        t_end=1.41,
        snapshot_times=[0.24, 0.47, 0.70, 0.94, 1.17],
        output_dir=RESULTS_PATH / "pcp",
        display_u=(0.0, 15.0),
        display_w=(0.0, 14.0),
    )


def preset_de(dx: float = DESK_DX, ell: float = 0.25, t_end: float = 6.0) -> RunConfig:
    return RunConfig(
        grid=GridSpec.from_spacing(-1.0, 1.0, -2.0, 2.0, dx),
        params=ModelParams(
            alpha=1.0, beta=0.2, gamma=0.4, delta=24.0, mu=0.5, kappa=1.0, ell=ell
        ),
        scenario="de",
        # two small predator disks in a uniform prey population
        u0="0.25 * ((x + 0.4)**2 + (y - 1)**2 < 0.01)"
        " + 0.2 * ((x - 0.3)**2 + (y + 1.2)**2 < 0.04)",
        w0="0.2 + 0 * x",
        t_end=t_end,
        snapshot_times=[0.75, 1.5, 3.0, 4.5, 6.0, 12.0],
        output_dir=RESULTS_PATH / "de",
        display_u=(0.0, 0.4),
        display_w=(0.2, 0.24),
    )


PRESETS: Dict[str, Callable[..., RunConfig]] = {"pcp": preset_pcp, "de": preset_de}
