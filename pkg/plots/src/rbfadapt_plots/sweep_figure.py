"""Contour map of node counts over the (a, eps) sweep grid.

Reads sweep.csv, averages n_nodes over seeds for each (function, a, eps)
cell, and draws filled contours of log10(mean N) per function. Degenerate
grids (a single row or column) fall back to a line/image plot so the script
still produces a figure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_sweep


def _mean_grid(data, kind):
    mask = data["function"] == kind
    a_values = np.unique(data["a"][mask])
    eps_values = np.unique(data["eps"][mask])
    grid = np.full((len(a_values), len(eps_values)), np.nan)
    for i, a in enumerate(a_values):
        for j, eps in enumerate(eps_values):
            cell = mask & (data["a"] == a) & (data["eps"] == eps)
            if cell.any():
                grid[i, j] = data["n_nodes"][cell].mean()
    return a_values, eps_values, grid


def plot_sweep(sweep_csv, out_path=None):
    """Build the contour figure; returns the matplotlib figure."""
    data = read_sweep(sweep_csv)
    kinds = sorted(set(data["function"].tolist())) or ["(empty)"]
    fig, axes = plt.subplots(1, max(len(kinds), 1), figsize=(6 * max(len(kinds), 1), 5),
                             squeeze=False)
    for ax, kind in zip(axes[0], kinds):
        if kind == "(empty)":
            ax.set_title("no data")
            continue
        a_values, eps_values, grid = _mean_grid(data, kind)
        log_n = np.log10(np.maximum(grid, 1.0))
        if len(a_values) >= 2 and len(eps_values) >= 2:
            contour = ax.contourf(
                np.log10(eps_values), np.log10(a_values), log_n, levels=12,
                cmap="viridis",
            )
            fig.colorbar(contour, ax=ax, label="log10 mean N")
        else:
            image = ax.imshow(log_n, aspect="auto", cmap="viridis", origin="lower")
            fig.colorbar(image, ax=ax, label="log10 mean N")
        ax.set_xlabel("log10 eps")
        ax.set_ylabel("log10 a")
        ax.set_title(f"function {kind}")
    fig.tight_layout()
    if out_path is not None:
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-sweep", description="Contour map of an rbfadapt sweep CSV"
    )
    parser.add_argument("sweep", type=Path, help="path to sweep.csv")
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args(argv)
    out = args.out or args.sweep.with_suffix(".png")
    try:
        plot_sweep(args.sweep, out_path=out)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"plot-sweep: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
