import argparse
import json
import logging
import os
from pathlib import Path

from driver.output import read_series
from hyperprey.analysis import DiagnosticsSeries

BOUND_NAMES = ["l1_u", "linf_u", "l1_w", "linf_w", "support_u"]


def print_ratio(
    field: str, observed: float, bound: float, t: float, tol: float, marker=None
):
    ratio = observed / bound if bound != 0 else (0.0 if observed == 0 else float("inf"))
    if marker is None:
        marker = "x" if ratio > 1 + tol else "?" if ratio > 1 else ""
    print(
        f"{marker:>2}  {f'{field}:':<12} {ratio * 100:>7.2f}% "
        f" =  {observed:>10.4g} / {bound:>10.4g}  (t={t:g})"
    )


def analyze_series(series: DiagnosticsSeries, tol_audit: float, ell: float):
    df = series.to_frame()
    print(f"{len(df)} records, t in [{df['t'].min():g}, {df['t'].max():g}]\n")
    print("#### Worst observed / bound")
    for name in BOUND_NAMES:
        if name == "support_u":
            # support carries one kernel radius of slack instead of a relative one
            slack = df[name] - df[f"bound_{name}"]
            row = df.loc[slack.idxmax()]
            marker = "x" if slack.max() > ell else ""
        else:
            ratio = df[name] / df[f"bound_{name}"]
            row = df.loc[ratio.fillna(0).idxmax()]
            marker = None
        print_ratio(name, row[name], row[f"bound_{name}"], row["t"], tol_audit, marker)
    print()
    print("#### Positivity")
    print(f"    min u = {df['min_u'].min():.4g}, min w = {df['min_w'].min():.4g}")
    failures = series.failures()
    if any(failures.values()):
        logging.warning(f"Records failing bounds: {failures}")


def main(data_dir: Path):
    print(f"## Data Analysis for {data_dir}\n")
    series_path = data_dir / "series.csv"
    if not os.path.isfile(series_path):
        raise FileNotFoundError(f"No series.csv in {data_dir}")
    with open(data_dir / "config.json", "r") as f_config:
        config = json.load(f_config)
    analyze_series(
        read_series(series_path),
        tol_audit=float(config["tol_audit"]),
        ell=float(config["ell"]),
    )
    summary_path = data_dir / "summary.json"
    if os.path.isfile(summary_path):
        with open(summary_path, "r") as f_summary:
            summary = json.load(f_summary)
        print()
        print("#### Observables")
        print(f"    peaks: {summary['num_peaks']}, spacing: {summary['peak_spacing']}")
        print(f"    dip and rise: {summary['dip_and_rise']}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("data_dir", help="run output directory", type=Path)
    args = parser.parse_args()

    main(data_dir=args.data_dir)
