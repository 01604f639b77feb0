"""
Dynamic Equilibrium under different kernel radii. Each variant runs in its own
process and directory; the table reports how many predator peaks form and how
far apart they sit.
"""

import concurrent.futures
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, Sequence

import pandas as pd

from hyperprey.utils import format_float

from .config import RunConfig
from .run import simulate
from .utils import prepare_data_dir

DEFAULT_ELLS = (0.5, 0.25, 0.1875)


def variant_config(base: RunConfig, ell: float, out_dir: Path) -> RunConfig:
    return replace(
        base,
        params=replace(base.params, ell=ell),
        output_dir=Path(out_dir) / f"ell={format_float(ell)}",
    )


def run_variant(cfg: RunConfig) -> Dict:
    prepare_data_dir(cfg.output_dir, cleanup=True)
    cfg.write_kv(Path(cfg.output_dir) / "run.cfg")
    result = simulate(cfg)
    spacing = result.peaks.spacing
    return {
        "ell": cfg.params.ell,
        "steps": result.state.step_index,
        "num_peaks": result.peaks.count,
        "spacing": spacing,
        "spacing_below_ell": spacing is not None and spacing < cfg.params.ell,
    }


def sweep_ell(
    base: RunConfig,
    ells: Sequence[float],
    out_dir: str | Path,
    max_workers: int | None = None,
) -> pd.DataFrame:
    configs = [variant_config(base, ell, Path(out_dir)) for ell in ells]
    # fail before any process is spawned
    for cfg in configs:
        cfg.validate()
    logging.info(f"Sweep over ell={list(ells)} with {max_workers or 'default'} workers")
    with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as executor:
        rows = list(executor.map(run_variant, configs))
    return pd.DataFrame(rows).sort_values("ell", ascending=False, ignore_index=True)


def spacing_decreases(df: pd.DataFrame) -> bool:
    """Whether peak spacing shrinks strictly as ell shrinks."""
    df = df.sort_values("ell", ascending=False)
    spacing = df["spacing"].tolist()
    if any(s is None or pd.isna(s) for s in spacing):
        return False
    return all(a > b for a, b in zip(spacing, spacing[1:]))
