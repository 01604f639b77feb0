from .coupling import ModelParams, SimState, SwapAsymmetryTracker, apply_boundary, run, step
from .hyperbolic import HyperbolicStepConfig, cfl_dt
from .parabolic import ParabolicStepConfig, parabolic_dt

__all__ = [
    "HyperbolicStepConfig",
    "ModelParams",
    "ParabolicStepConfig",
    "SimState",
    "SwapAsymmetryTracker",
    "apply_boundary",
    "cfl_dt",
    "parabolic_dt",
    "run",
    "step",
]
