"""
Run one scenario end to end: build the initial data, step to t_end, and leave
snapshots, the diagnostics series, the mass table, the final peak table and a
summary in the output directory.
"""

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

from hyperprey.analysis import (
    DiagnosticsRecorder,
    DiagnosticsSeries,
    DipAndRise,
    PeakSet,
    detect_peaks,
    dip_and_rise,
    mass_series,
)
from hyperprey.errors import InvalidParameterError
from hyperprey.grid import Field
from hyperprey.kernel import (
    KernelNorms,
    build_mollifier,
    compute_kernel_norms,
    sample_kernel,
)
from hyperprey.solver.coupling import SimState, run
from hyperprey.velocity import Extension

from .config import RunConfig
from .output import SnapshotWriter, write_series
from .presets import PRESETS
from .utils import dump_json, prepare_data_dir


@dataclass
class RunResult:
    state: SimState
    series: DiagnosticsSeries
    norms: KernelNorms
    peaks: PeakSet
    dip: DipAndRise | None
    snapshot_times: List[float]

    def summary(self) -> Dict:
        return {
            "t": self.state.t,
            "steps": self.state.step_index,
            "K": self.norms.K,
            "bounds_ok": self.series.all_ok(),
            "bound_failures": self.series.failures(),
            "min_u": min(r.min_u for r in self.series.records),
            "min_w": min(r.min_w for r in self.series.records),
            "num_peaks": self.peaks.count,
            "peak_spacing": self.peaks.spacing,
            "dip_and_rise": None
            if self.dip is None
            else {"t_min": self.dip.t_min, "mass_min": self.dip.mass_min, "rise": self.dip.rise},
            "snapshots": self.snapshot_times,
        }


def initial_fields(cfg: RunConfig):
    u_fn, w_fn = cfg.profiles()
    u0 = Field.from_function(cfg.grid, u_fn)
    w0 = Field.from_function(cfg.grid, w_fn)
    for name, f in (("u0", u0), ("w0", w0)):
        if not f.is_finite():
            raise InvalidParameterError(f"Initial datum {name} is not finite")
        if f.min() < 0:
            raise InvalidParameterError(f"Initial datum {name} is negative somewhere")
    return u0, w0, w_fn


def simulate(cfg: RunConfig, *, write_outputs: bool = True) -> RunResult:
    cfg.validate()
    p = cfg.params
    u0, w0, w_fn = initial_fields(cfg)
    m = build_mollifier(p.ell)
    table = sample_kernel(m, cfg.grid)
    norms = compute_kernel_norms(m, p.kappa)
    logging.info(f"Kernel ell={p.ell:g}: K={norms.K:.6g} on a {table.shape} stencil")

    recorder = DiagnosticsRecorder(u0, w0, p, norms.K, cfg.tol_audit)
    writer = SnapshotWriter(
        cfg.output_dir, cfg.output_times(), cfg.display_u, cfg.display_w
    )
    hcfg, pcfg = cfg.step_configs()
    state, series = run(
        SimState.initial(u0, w0),
        p,
        table,
        cfg.t_end,
        [writer] if write_outputs else [],
        hcfg=hcfg,
        pcfg=pcfg,
        extension=Extension.frozen(w0, table.radius_cells, profile=w_fn),
        stops=cfg.output_times(),
        recorder=recorder,
        audit=cfg.audit,
    )

    peaks = detect_peaks(state.u, cfg.peak_threshold)
    masses = mass_series(series)
    dip = dip_and_rise(masses["t"].to_numpy(), masses["mass_u"].to_numpy())
    result = RunResult(state, series, norms, peaks, dip, writer.written)
    logging.info(f"Final predator density: {peaks}")
    if dip is not None:
        logging.info(
            f"Predator mass dips to {dip.mass_min:.4g} at t={dip.t_min:g}, "
            f"then rises by {dip.rise * 100:.1f}%"
        )

    if write_outputs:
        out = Path(cfg.output_dir)
        write_series(series, out / "series.csv")
        masses.to_csv(out / "mass.csv", index=False)
        peaks.to_frame().to_csv(out / "peaks.csv", index=False)
        dump_json(result.summary(), out / "summary.json")
        logging.info(f"Results written to {out}")
    return result


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "config",
        help="key=value config file; its keys override the preset, if one is given",
        nargs="?",
        type=str,
    )
    parser.add_argument(
        "--preset", help="start from a reference experiment", choices=sorted(PRESETS)
    )
    parser.add_argument("--dx", help="cell size (dy = dx)", type=str)
    parser.add_argument("--ell", help="kernel radius", type=str)
    parser.add_argument("--t-end", help="final time", type=str)
    parser.add_argument("--out", help="output directory", type=str)
    parser.add_argument(
        "--snapshots-every", help="write snapshots at this time interval", type=str
    )
    parser.add_argument(
        "--audit",
        help="fail on lost positivity, boundary drift or exceeded bounds",
        action="store_true",
    )


def preprocess_args(args: argparse.Namespace) -> RunConfig:
    base = PRESETS[args.preset]() if args.preset is not None else None
    cfg = RunConfig.from_file(args.config, base) if args.config is not None else base
    assert cfg is not None
    cfg = cfg.with_overrides(
        dx=args.dx,
        ell=args.ell,
        t_end=args.t_end,
        output_dir=args.out,
        snapshot_interval=args.snapshots_every,
        audit="on" if args.audit else None,
    )
    cfg.validate()

    prepare_data_dir(cfg.output_dir, cleanup=True)
    cfg.write_json(Path(cfg.output_dir) / "config.json")
    cfg.write_kv(Path(cfg.output_dir) / "run.cfg")
    return cfg


def main(cfg: RunConfig) -> int:
    result = simulate(cfg)
    if cfg.audit and not result.series.all_ok():
        failed = {k: n for k, n in result.series.failures().items() if n}
        logging.error(f"Bound audit failed: {failed}")
        return 2
    return 0
