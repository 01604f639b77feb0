"""
Command-line surface:

    hyperprey run [config] [--preset pcp|de] [--dx DX] [--t-end T] [--out DIR] ...
    hyperprey audit-kernel --ell ELL --kappa KAPPA
    hyperprey oracle-check
    hyperprey peaks SNAPSHOT
    hyperprey sweep-ell --out DIR

Exit codes: 0 on success, 1 on invalid input or usage, 2 when a run diverges or
an audit or convergence check fails.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List

import pandas as pd

from hyperprey.analysis import detect_peaks
from hyperprey.convergence import heat_kernel_report, hyperbolic_study, parabolic_study
from hyperprey.errors import (
    AuditFailure,
    DivergedError,
    InvalidParameterError,
    SnapshotFormatError,
    StepRejectedError,
)
from hyperprey.grid import GridSpec
from hyperprey.kernel import build_mollifier, compute_kernel_norms, sample_kernel
from hyperprey.utils import str_cast_floats, str_cast_ratio
from hyperprey.velocity import audit_v_condition

from . import run
from .output import read_snapshot
from .presets import preset_de
from .sweep import DEFAULT_ELLS, spacing_decreases, sweep_ell
from .utils import dump_json, prepare_data_dir

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2

MIN_PARABOLIC_ORDER = 1.8
MIN_HYPERBOLIC_ORDER = 0.8
HEAT_MASS_TOL = 1e-6
HEAT_GRAD_TOL = 1e-4


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    # report usage errors to the caller instead of exiting with argparse's code 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def cmd_run(args: argparse.Namespace) -> int:
    if args.config is None and args.preset is None:
        raise UsageError("run needs a config file or --preset")
    cfg = run.preprocess_args(args)
    return run.main(cfg)


def cmd_audit_kernel(args: argparse.Namespace) -> int:
    h = args.half_width
    g = GridSpec.from_spacing(-h, h, -h, h, args.dx)
    m = build_mollifier(args.ell)
    table = sample_kernel(m, g)
    norms = compute_kernel_norms(m, args.kappa)
    audit = audit_v_condition(
        table, norms, args.trials, args.seed, tol_discrete=args.tol_discrete
    )
    print(f"K = {norms.K:.6g}")
    for name, value in zip(("2k|W21|", "2k|W1inf|", "3|W1inf|", "c|W21|"), norms.candidates):
        print(f"  candidate {name:<10} {value:.6g}")
    for name, ratio in audit.worst_ratios.items():
        marker = "" if ratio <= 1 + audit.tol_discrete else "!!"
        print(f"{marker:>2}  {name:<15} worst ratio {ratio:.4g}")
    print(f"passed: {audit.passed}")
    if args.out is not None:
        dump_json({"norms": norms.dump(), "audit": audit.dump()}, args.out)
    return EXIT_OK if audit.passed else EXIT_FAILED


def cmd_oracle_check(args: argparse.Namespace) -> int:
    dxs = str_cast_floats(args.dxs)
    ok = True
    para = parabolic_study(dxs, a=args.a)
    hyper = hyperbolic_study(dxs)
    for study, threshold in ((para, MIN_PARABOLIC_ORDER), (hyper, MIN_HYPERBOLIC_ORDER)):
        passed = study.min_order >= threshold
        ok &= passed
        print(f"{study.name} convergence (required order >= {threshold}):")
        print(study.to_frame().to_string(index=False))
        print(f"passed: {passed}\n")
    heat = heat_kernel_report()
    heat_ok = bool(
        ((heat["sampled_l1"] - 1).abs() <= HEAT_MASS_TOL).all()
        and (heat["grad_rel_err"] <= HEAT_GRAD_TOL).all()
    )
    ok &= heat_ok
    print("heat kernel identities:")
    print(heat.to_string(index=False))
    print(f"passed: {heat_ok}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_peaks(args: argparse.Namespace) -> int:
    u = read_snapshot(args.snapshot)
    peaks = detect_peaks(u, args.threshold)
    print(peaks)
    df = peaks.to_frame()
    if args.out is not None:
        df.to_csv(args.out, index=False)
    else:
        print(df.to_string(index=False))
    return EXIT_OK


def cmd_sweep_ell(args: argparse.Namespace) -> int:
    base = preset_de().with_overrides(dx=args.dx, t_end=args.t_end)
    prepare_data_dir(args.out, cleanup=True)
    df = sweep_ell(base, str_cast_floats(args.ells), Path(args.out), args.workers)
    df.to_csv(Path(args.out) / "sweep.csv", index=False)
    with pd.option_context("display.width", 120):
        print(df.to_string(index=False))
    print(f"spacing decreases with ell: {spacing_decreases(df)}")
    return EXIT_OK


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="hyperprey",
        description="Nonlocal predator-prey simulator (hyperbolic predators, parabolic preys)",
    )
    parser.add_argument("-v", "--verbose", help="debug logging", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario")
    run.add_parser_args(p_run)
    p_run.set_defaults(func=cmd_run)

    p_audit = sub.add_parser("audit-kernel", help="kernel norms and velocity-map audit")
    p_audit.add_argument("--ell", help="kernel radius", type=float, default=0.25)
    p_audit.add_argument("--kappa", help="maximal predator speed", type=float, default=1.0)
    p_audit.add_argument("--dx", help="cell size", type=float, default=0.02)
    p_audit.add_argument(
        "--half-width", help="audit on [-h, h]^2", type=float, default=1.0
    )
    p_audit.add_argument("--trials", help="random fields", type=int, default=200)
    p_audit.add_argument("--seed", help="random seed", type=int, default=0)
    p_audit.add_argument(
        "--tol-discrete", help="ratio slack, e.g. 0.05 or 5%%", type=str_cast_ratio, default=0.05
    )
    p_audit.add_argument("--out", help="write the report as json", type=str)
    p_audit.set_defaults(func=cmd_audit_kernel)

    p_oracle = sub.add_parser("oracle-check", help="solver convergence against oracles")
    p_oracle.add_argument("--dxs", help="comma-separated meshes", default="0.04,0.02,0.01")
    p_oracle.add_argument(
        "--a", help="constant prey growth rate in the heat test", type=float, default=0.0
    )
    p_oracle.set_defaults(func=cmd_oracle_check)

    p_peaks = sub.add_parser("peaks", help="local maxima of a predator snapshot")
    p_peaks.add_argument("snapshot", help="HPSNAP1 file")
    p_peaks.add_argument(
        "--threshold", help="fraction of the maximum", type=str_cast_ratio, default=0.25
    )
    p_peaks.add_argument("--out", help="write the peak table as csv", type=str)
    p_peaks.set_defaults(func=cmd_peaks)

    p_sweep = sub.add_parser("sweep-ell", help="Dynamic Equilibrium for several kernel radii")
    p_sweep.add_argument(
        "--ells", help="comma-separated radii", default=",".join(map(str, DEFAULT_ELLS))
    )
    p_sweep.add_argument("--dx", help="cell size", type=str)
    p_sweep.add_argument("--t-end", help="final time", type=str)
    p_sweep.add_argument("--out", help="output directory", required=True)
    p_sweep.add_argument("--workers", help="parallel processes", type=int)
    p_sweep.set_defaults(func=cmd_sweep_ell)
    return parser


def cli_main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(e, file=sys.stderr)
        return EXIT_INVALID
    except (InvalidParameterError, SnapshotFormatError, OSError) as e:
        logging.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID
    except (StepRejectedError, DivergedError, AuditFailure) as e:
        logging.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED
