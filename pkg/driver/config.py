"""
Run configuration: a flat key=value text format, e.g.

    # Predators Chasing Preys at desk resolution
    scenario = pcp
    x_min = -1
    ...
    u0 = 4 * ((2 * x)**2 + (1.25 * (y + 1))**2 <= 1)
    tol_audit = 10%

Initial data are numpy expressions in the cell-center coordinates `x` and `y`.
"""

import ast
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np

from hyperprey.errors import InvalidParameterError
from hyperprey.grid import GridSpec
from hyperprey.kernel import build_mollifier, check_mesh
from hyperprey.solver.coupling import ModelParams
from hyperprey.solver.hyperbolic import HyperbolicStepConfig
from hyperprey.solver.parabolic import ParabolicStepConfig
from hyperprey.utils import (
    format_float,
    str_cast_bool,
    str_cast_floats,
    str_cast_range,
    str_cast_ratio,
)

from .env import RESULTS_PATH

GRID_KEYS = ["x_min", "x_max", "y_min", "y_max", "dx", "dy"]
PARAM_KEYS = [f.name for f in fields(ModelParams)]

# names an initial-datum expression may refer to
_EXPR_NAMES: Dict[str, object] = {
    "pi": math.pi,
    "e": math.e,
    "abs": np.abs,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
    "hypot": np.hypot,
    "maximum": np.maximum,
    "minimum": np.minimum,
    "where": np.where,
}
_EXPR_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Compare,
    ast.Call,
    ast.Name,
    ast.Load,
    ast.Constant,
    ast.operator,
    ast.unaryop,
    ast.cmpop,
)

Profile = Callable[[np.ndarray, np.ndarray], np.ndarray]


def compile_profile(expr: str) -> Profile:
    """Turn a numpy expression in x and y into a callable, allowing only arithmetic,
    comparisons and the functions in `_EXPR_NAMES`."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as e:
        raise InvalidParameterError(f"Cannot parse initial datum {expr!r}: {e}") from e
    for node in ast.walk(tree):
        if not isinstance(node, _EXPR_NODES):
            raise InvalidParameterError(
                f"Unsupported construct {type(node).__name__} in {expr!r}"
            )
        if isinstance(node, ast.Name) and node.id not in {"x", "y", *_EXPR_NAMES}:
            raise InvalidParameterError(f"Unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.Call) and not isinstance(node.func, ast.Name):
            raise InvalidParameterError(f"Only plain function calls allowed in {expr!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise InvalidParameterError(f"Only numeric constants allowed in {expr!r}")
    code = compile(tree, "<initial datum>", "eval")

    def profile(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        val = eval(code, {"__builtins__": {}}, {**_EXPR_NAMES, "x": x, "y": y})
        return np.asarray(val, dtype=np.float64)

    return profile


def load_kv(path: str | Path) -> Dict[str, str]:
    kv = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise InvalidParameterError(f"Cannot read config file {path}: {e}") from e
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"{path}:{lineno}: expected `key = value`")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    return kv


@dataclass
class RunConfig:
    grid: GridSpec
    params: ModelParams
    scenario: str
    u0: str
    w0: str
    t_end: float
    snapshot_interval: float | None = None
    snapshot_times: List[float] = field(default_factory=list)
    output_dir: Path = RESULTS_PATH / "run"
    audit: bool = False
    audit_seed: int = 0
    audit_trials: int = 200
    tol_audit: float = 0.10
    tol_discrete: float = 0.05
    peak_threshold: float = 0.25
    cfl_number: float = 0.45
    safety: float = 0.9
    display_u: Tuple[float, float] = (0.0, 1.0)
    display_w: Tuple[float, float] = (0.0, 1.0)

    def validate(self):
        """Reject a configuration before anything is allocated."""
        # ModelParams checks mu > 0 and non-negative rates on construction
        check_mesh(build_mollifier(self.params.ell), self.grid)
        if not self.t_end > 0:
            raise InvalidParameterError(f"t_end must be positive; got {self.t_end}")
        if self.snapshot_interval is not None and not self.snapshot_interval > 0:
            raise InvalidParameterError(
                f"snapshot_interval must be positive; got {self.snapshot_interval}"
            )
        if any(t <= 0 for t in self.snapshot_times):
            raise InvalidParameterError(f"snapshot_times must be positive: {self.snapshot_times}")
        if self.audit_trials < 1:
            raise InvalidParameterError(f"audit_trials must be >= 1; got {self.audit_trials}")
        if not 0 < self.peak_threshold < 1:
            raise InvalidParameterError(
                f"peak_threshold must be in (0, 1); got {self.peak_threshold}"
            )
        for name in ("display_u", "display_w"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise InvalidParameterError(f"{name} needs lo < hi; got {lo}, {hi}")
        self.step_configs()
        # surfaces syntax errors now rather than after the run starts
        compile_profile(self.u0)
        compile_profile(self.w0)

    def step_configs(self) -> Tuple[HyperbolicStepConfig, ParabolicStepConfig]:
        return HyperbolicStepConfig(self.cfl_number), ParabolicStepConfig(self.safety)

    def profiles(self) -> Tuple[Profile, Profile]:
        return compile_profile(self.u0), compile_profile(self.w0)

    def output_times(self) -> List[float]:
        """Clock values at which snapshots are written, t_end included."""
        times = set(t for t in self.snapshot_times if t < self.t_end)
        if self.snapshot_interval is not None:
            k = 1
            while k * self.snapshot_interval < self.t_end * (1 - 1e-12):
                times.add(k * self.snapshot_interval)
                k += 1
        return sorted(times) + [self.t_end]

    def to_kv(self) -> Dict[str, str]:
        g = self.grid
        kv = {
            "x_min": format_float(g.x_min),
            "x_max": format_float(g.x_max),
            "y_min": format_float(g.y_min),
            "y_max": format_float(g.y_max),
            "dx": format_float(g.dx),
            "dy": format_float(g.dy),
        }
        kv.update({k: format_float(v) for k, v in asdict(self.params).items()})
        kv.update(
            {
                "scenario": self.scenario,
                "u0": self.u0,
                "w0": self.w0,
                "t_end": format_float(self.t_end),
                "snapshot_interval": "none"
                if self.snapshot_interval is None
                else format_float(self.snapshot_interval),
                "snapshot_times": ",".join(format_float(t) for t in self.snapshot_times),
                "output_dir": str(self.output_dir),
                "audit": "on" if self.audit else "off",
                "audit_seed": str(self.audit_seed),
                "audit_trials": str(self.audit_trials),
                "tol_audit": format_float(self.tol_audit),
                "tol_discrete": format_float(self.tol_discrete),
                "peak_threshold": format_float(self.peak_threshold),
                "cfl_number": format_float(self.cfl_number),
                "safety": format_float(self.safety),
                "display_u": ",".join(format_float(v) for v in self.display_u),
                "display_w": ",".join(format_float(v) for v in self.display_w),
            }
        )
        return kv

    @classmethod
    def from_kv(cls, kv: Dict[str, str], base: "RunConfig | None" = None) -> "RunConfig":
        """Build from key=value pairs; keys absent from `kv` come from `base`."""
        merged = {**(base.to_kv() if base is not None else {}), **kv}
        known = set(cls.__dataclass_fields__) - {"grid", "params"}
        known |= set(GRID_KEYS) | set(PARAM_KEYS)
        unknown = sorted(set(merged) - known)
        if unknown:
            raise InvalidParameterError(f"Unknown config keys: {', '.join(unknown)}")
        # dy defaults to dx when only dx is given
        if "dx" in kv and "dy" not in kv:
            merged["dy"] = kv["dx"]
        required = GRID_KEYS + PARAM_KEYS + ["scenario", "u0", "w0", "t_end"]
        missing = [k for k in required if k not in merged]
        if missing:
            raise InvalidParameterError(f"Missing config keys: {', '.join(missing)}")

        try:
            grid = GridSpec.from_spacing(
                *(float(merged[k]) for k in ("x_min", "x_max", "y_min", "y_max")),
                dx=float(merged["dx"]),
                dy=float(merged["dy"]),
            )
            params = ModelParams(**{k: float(merged[k]) for k in PARAM_KEYS})
            interval = merged.get("snapshot_interval", "none")
            defaults = cls.__dataclass_fields__
            cfg = cls(
                grid=grid,
                params=params,
                scenario=merged["scenario"],
                u0=merged["u0"],
                w0=merged["w0"],
                t_end=float(merged["t_end"]),
                snapshot_interval=None
                if interval.lower() in {"", "none"}
                else float(interval),
                snapshot_times=str_cast_floats(merged.get("snapshot_times", "")),
                output_dir=Path(merged.get("output_dir", defaults["output_dir"].default)),
                audit=str_cast_bool(merged.get("audit", "off")),
                audit_seed=int(merged.get("audit_seed", "0")),
                audit_trials=int(merged.get("audit_trials", "200")),
                tol_audit=str_cast_ratio(merged.get("tol_audit", "0.10")),
                tol_discrete=str_cast_ratio(merged.get("tol_discrete", "0.05")),
                peak_threshold=str_cast_ratio(merged.get("peak_threshold", "0.25")),
                cfl_number=float(merged.get("cfl_number", "0.45")),
                safety=float(merged.get("safety", "0.9")),
                display_u=str_cast_range(merged.get("display_u", "0,1")),
                display_w=str_cast_range(merged.get("display_w", "0,1")),
            )
        except InvalidParameterError:
            raise
        except ValueError as e:
            raise InvalidParameterError(f"Bad config value: {e}") from e
        return cfg

    @classmethod
    def from_file(cls, path: str | Path, base: "RunConfig | None" = None) -> "RunConfig":
        return cls.from_kv(load_kv(path), base)

    def with_overrides(self, **kv: str | None) -> "RunConfig":
        """Apply command-line overrides given as strings; None means not given."""
        given = {k: v for k, v in kv.items() if v is not None}
        if not given:
            return replace(self)
        return RunConfig.from_kv(given, base=self)

    def write_kv(self, path: str | Path):
        with open(path, "w") as f:
            for k, v in self.to_kv().items():
                f.write(f"{k} = {v}\n")

    def dump(self) -> Dict:
        return {
            **self.to_kv(),
            "nx": self.grid.nx,
            "ny": self.grid.ny,
        }

    def write_json(self, path: str | Path):
        with open(path, "w") as f:
            json.dump(self.dump(), f, indent=2)
