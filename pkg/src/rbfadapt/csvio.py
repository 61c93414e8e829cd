"""CSV emission for run artifacts.

All run outputs share four files with stable schemas:

    nodes.csv    id, x[, y][, f]
    cells.csv    id, v0, v1[, v2], measure, bx[, by]
    errors.csv   id, x[, y], estimate, actual, level
    summary.csv  termination, n_nodes, levels, global_value, global_error

Floats are written with 17 significant digits, so a seeded rerun reproduces
the numeric columns byte for byte.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

from .driver import AdaptiveReport
from .geometry import write_cells_csv, write_nodes_csv


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_errors_csv(path, report: AdaptiveReport) -> None:
    d = report.config.d
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "x"] + (["y"] if d == 2 else []) + ["estimate", "actual", "level"])
        for i, record in enumerate(report.records):
            writer.writerow(
                [i]
                + [_fmt(c) for c in record.location]
                + [_fmt(record.estimate), _fmt(record.actual), record.level]
            )


def write_summary_csv(path, report: AdaptiveReport) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["termination", "n_nodes", "levels", "global_value", "global_error"]
        )
        writer.writerow(
            [
                report.termination,
                report.n_nodes,
                report.levels_used,
                _fmt(report.global_value),
                _fmt(report.global_error),
            ]
        )


def write_report(outdir, report: AdaptiveReport) -> dict[str, Path]:
    """Write the four run artifacts into ``outdir``; returns their paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "nodes": outdir / "nodes.csv",
        "cells": outdir / "cells.csv",
        "errors": outdir / "errors.csv",
        "summary": outdir / "summary.csv",
    }
    write_nodes_csv(paths["nodes"], report.state.nodes, f_values=report.f_values)
    if report.state.tessellation is not None:
        write_cells_csv(paths["cells"], report.state.tessellation)
    else:
        paths.pop("cells")
    write_errors_csv(paths["errors"], report)
    write_summary_csv(paths["summary"], report)
    return paths
