"""
This script loads `mass.csv` produced by `hyperprey run` and plots the domain
integrals of both densities against time.
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

from .plot_style import LINEWIDTH, color_map, labels_map, line_style_map
from .plot_util import build_fig_single_col, save_fig


def plot_mass(data_dir: Path, fig_path: Path, separate_axes: bool):
    df = pd.read_csv(data_dir / "mass.csv", float_precision="round_trip")
    fig, ax = build_fig_single_col(1, 1, hw_ratio=0.6)
    axes = {"u": ax, "w": ax.twinx() if separate_axes else ax}
    for key in ("u", "w"):
        axes[key].plot(
            df["t"],
            df[f"mass_{key}"],
            line_style_map[key],
            color=color_map[key],
            linewidth=LINEWIDTH,
            label=labels_map[key],
        )
    ax.set_xlabel("t")
    ax.set_ylabel(labels_map["u"])
    if separate_axes:
        axes["w"].set_ylabel(labels_map["w"])
        axes["w"].spines[["top"]].set_visible(False)
    fig.legend(loc="upper center", ncol=2, frameon=False)
    save_fig(fig, fig_path)
    plt.close(fig)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("data_dir", help="run output directory", type=Path)
    parser.add_argument("--fig", help="figure path", type=Path)
    parser.add_argument(
        "--separate_axes",
        help="draw the prey integral against its own y-axis",
        action="store_true",
    )
    args = parser.parse_args()

    plot_mass(
        data_dir=args.data_dir,
        fig_path=args.fig or args.data_dir / "mass.pdf",
        separate_axes=args.separate_axes,
    )
