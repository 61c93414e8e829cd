"""Figure rendering for rbfadapt CSV artifacts.

These scripts are pure CSV-to-image transforms: they read the documented
run-artifact schemas (nodes, cells, errors, summary, sweep) and never
recompute any numerics.
"""

import matplotlib

matplotlib.use("Agg")

from .io import SchemaError, read_errors, read_nodes, read_summary, read_sweep
from .run_figure import plot_run
from .sweep_figure import plot_sweep

__all__ = [
    "SchemaError",
    "plot_run",
    "plot_sweep",
    "read_errors",
    "read_nodes",
    "read_summary",
    "read_sweep",
]
