"""Readers for the rbfadapt CSV artifact schemas.

Each reader validates the header and returns plain numpy arrays / dicts.
A wrong header raises SchemaError; a completely empty errors file counts as
a valid file with zero rows (runs can legitimately produce no evaluation
points worth plotting).
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """A CSV file does not match its documented schema."""


def _read_rows(path) -> list[list[str]]:
    with open(path, newline="") as handle:
        return [row for row in csv.reader(handle) if row]


def _float(text: str) -> float:
    return float(text) if text.strip() else np.nan


def read_nodes(path) -> dict:
    """nodes.csv: id, x[, y][, f] -> {'points': (n, d), 'f': (n,) or None}."""
    rows = _read_rows(path)
    if not rows:
        raise SchemaError(f"{path}: empty nodes file")
    header = rows[0]
    if header[:2] != ["id", "x"]:
        raise SchemaError(f"{path}: expected header starting 'id,x', got {header}")
    tail = header[2:]
    has_y = tail[:1] == ["y"]
    if has_y:
        tail = tail[1:]
    has_f = tail[:1] == ["f"]
    if tail not in ([], ["f"]):
        raise SchemaError(f"{path}: unexpected trailing columns {tail}")
    dim = 2 if has_y else 1
    data = rows[1:]
    points = np.array([[_float(c) for c in row[1 : 1 + dim]] for row in data]).reshape(
        len(data), dim
    )
    f_values = (
        np.array([_float(row[1 + dim]) for row in data]) if has_f and data else None
    )
    if has_f and not data:
        f_values = np.empty(0)
    return {"points": points, "f": f_values}


def read_errors(path) -> dict:
    """errors.csv: id, x[, y], estimate, actual, level."""
    rows = _read_rows(path)
    if not rows:
        return {"points": np.empty((0, 1)), "estimate": np.empty(0),
                "actual": np.empty(0), "level": np.empty(0, dtype=int)}
    header = rows[0]
    if header == ["id", "x", "estimate", "actual", "level"]:
        dim = 1
    elif header == ["id", "x", "y", "estimate", "actual", "level"]:
        dim = 2
    else:
        raise SchemaError(f"{path}: unrecognized errors header {header}")
    data = rows[1:]
    points = np.array([[_float(c) for c in row[1 : 1 + dim]] for row in data]).reshape(
        len(data), dim
    )
    estimate = np.array([_float(row[1 + dim]) for row in data])
    actual = np.array([_float(row[2 + dim]) for row in data])
    level = np.array(
        [int(row[3 + dim]) if row[3 + dim].strip() else -1 for row in data], dtype=int
    )
    return {"points": points, "estimate": estimate, "actual": actual, "level": level}


def read_summary(path) -> dict:
    """summary.csv: termination, n_nodes, levels, global_value, global_error."""
    rows = _read_rows(path)
    if len(rows) < 2 or rows[0] != [
        "termination",
        "n_nodes",
        "levels",
        "global_value",
        "global_error",
    ]:
        raise SchemaError(f"{path}: bad summary file")
    row = rows[1]
    return {
        "termination": row[0],
        "n_nodes": int(row[1]),
        "levels": int(row[2]) if row[2].strip() else None,
        "global_value": _float(row[3]),
        "global_error": _float(row[4]),
    }


def read_sweep(path) -> dict:
    """sweep.csv: function, a, eps, seed, n_nodes, error, termination."""
    rows = _read_rows(path)
    if not rows or rows[0] != [
        "function",
        "a",
        "eps",
        "seed",
        "n_nodes",
        "error",
        "termination",
    ]:
        raise SchemaError(f"{path}: bad sweep file")
    data = rows[1:]
    return {
        "function": np.array([row[0] for row in data]),
        "a": np.array([_float(row[1]) for row in data]),
        "eps": np.array([_float(row[2]) for row in data]),
        "seed": np.array([int(row[3]) for row in data]),
        "n_nodes": np.array([int(row[4]) for row in data]),
        "error": np.array([_float(row[5]) for row in data]),
    }


def resolve_run_dir(target) -> dict[str, Path]:
    """Map a run directory (or an errors.csv path) to the artifact files."""
    target = Path(target)
    base = target if target.is_dir() else target.parent
    return {
        "nodes": base / "nodes.csv",
        "errors": base / "errors.csv",
        "summary": base / "summary.csv",
        "base": base,
    }
