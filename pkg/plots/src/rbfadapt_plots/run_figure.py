"""Render one adaptive run (nodes + errors + summary CSVs) as a figure.

1D runs get the classic three-panel layout: integrand values with node
locations, node spacing, and the estimate-vs-actual scatter on a log scale.
2D runs get a 2x2 layout: function values at nodes, node spacing, and maps of
the estimate and the actual error. Zero errors are floored at 1e-16 so their
markers stay visible on the log scale.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_errors, read_nodes, read_summary, resolve_run_dir

LOG_FLOOR = 1e-16


def _floored(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float)
    out[~np.isfinite(out) | (out <= 0)] = LOG_FLOOR
    return out


def plot_run(errors_csv, nodes_csv, summary_csv, out_path=None):
    """Build the figure and write it; returns the matplotlib figure."""
    nodes = read_nodes(nodes_csv)
    errors = read_errors(errors_csv)
    summary = read_summary(summary_csv)
    dim = nodes["points"].shape[1] if len(nodes["points"]) else 1

    if dim == 1:
        fig = _figure_1d(nodes, errors, summary)
    else:
        fig = _figure_2d(nodes, errors, summary)
    if out_path is not None:
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    return fig


def _title(summary) -> str:
    err = summary["global_error"]
    err_text = "" if np.isnan(err) else f", global error {err:.2e}"
    return (
        f"N={summary['n_nodes']}, {summary['termination']}"
        f" after level {summary['levels']}{err_text}"
    )


def _figure_1d(nodes, errors, summary):
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    x = nodes["points"][:, 0] if len(nodes["points"]) else np.empty(0)
    order = np.argsort(x)

    ax = axes[0]
    if nodes["f"] is not None and len(x):
        ax.plot(x[order], nodes["f"][order], "-", lw=0.8, color="steelblue")
        ax.plot(x, nodes["f"], ".", ms=3, color="crimson")
    else:
        ax.plot(x, np.zeros_like(x), "|", ms=10, color="crimson")
    ax.set_ylabel("f at nodes")
    ax.set_title(_title(summary))

    ax = axes[1]
    if len(x) > 1:
        xs = x[order]
        ax.semilogy(0.5 * (xs[:-1] + xs[1:]), np.diff(xs), ".", ms=3, color="k")
    ax.set_ylabel("node spacing")

    ax = axes[2]
    pts = errors["points"][:, 0] if len(errors["points"]) else np.empty(0)
    ax.semilogy(pts, _floored(errors["estimate"]), "o", ms=3, label="estimate",
                color="steelblue")
    ax.semilogy(pts, _floored(errors["actual"]), "x", ms=3, label="actual",
                color="crimson")
    ax.set_ylabel("per-point error")
    ax.set_xlabel("x")
    if len(pts):
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _figure_2d(nodes, errors, summary):
    fig, axes = plt.subplots(2, 2, figsize=(10, 9))
    pts = nodes["points"]

    ax = axes[0, 0]
    if nodes["f"] is not None and len(pts):
        sc = ax.scatter(pts[:, 0], pts[:, 1], c=nodes["f"], s=4, cmap="viridis")
        fig.colorbar(sc, ax=ax, shrink=0.8)
    elif len(pts):
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=2, color="k")
    ax.set_title("f at nodes")
    ax.set_aspect("equal")

    ax = axes[0, 1]
    if len(pts) > 1:
        # spacing proxy: distance to the nearest other node (display only)
        diffs = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        np.fill_diagonal(diffs, np.inf)
        nearest = diffs.min(axis=1)
        sc = ax.scatter(
            pts[:, 0], pts[:, 1],
            c=np.log10(np.maximum(nearest, LOG_FLOOR)), s=4, cmap="magma",
        )
        fig.colorbar(sc, ax=ax, shrink=0.8, label="log10 spacing")
    ax.set_title("node spacing")
    ax.set_aspect("equal")

    epts = errors["points"]
    for ax, key, label in (
        (axes[1, 0], "estimate", "log10 estimate"),
        (axes[1, 1], "actual", "log10 actual"),
    ):
        if len(epts):
            sc = ax.scatter(
                epts[:, 0], epts[:, 1],
                c=np.log10(_floored(errors[key])), s=4, cmap="coolwarm",
            )
            fig.colorbar(sc, ax=ax, shrink=0.8, label=label)
        ax.set_title(key)
        ax.set_aspect("equal")

    fig.suptitle(_title(summary))
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-run", description="Render rbfadapt run CSVs as a figure"
    )
    parser.add_argument("run", help="run directory (or path to its errors.csv)")
    parser.add_argument("--out", type=Path, default=None, help="output image path")
    args = parser.parse_args(argv)
    paths = resolve_run_dir(args.run)
    out = args.out or paths["base"] / f"{paths['base'].resolve().name}.png"
    try:
        plot_run(paths["errors"], paths["nodes"], paths["summary"], out_path=out)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"plot-run: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
