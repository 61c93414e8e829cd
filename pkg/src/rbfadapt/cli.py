"""Command-line entry points for experiment runs, sweeps, and benchmarks.

Subcommands: quad1d, diff1d, quad2d, diff2d, sweep, bench-timing,
trapz-baseline. Every run writes the CSV artifacts described in
:mod:`rbfadapt.csvio` into the output directory (flag --outdir, or the
RBFADAPT_OUTDIR environment variable). A config file with ``key = value``
lines can prefill any flag; explicit flags win.

Exit codes: 0 success (including node-cap termination), 2 configuration
error, 3 singular stencil system.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, csvio
from .baselines import adaptive_trapezoid_detailed
from .driver import AdaptiveConfig, run_adaptive
from .errors import ConfigError, RbfAdaptError, SingularSystem
from .geometry import write_nodes_csv, NodeSet
from .testfuncs import TestFunction, make_test_function, reference_function

_RUN_COMMANDS = {
    "quad1d": (1, "quadrature"),
    "diff1d": (1, "derivative"),
    "quad2d": (2, "quadrature"),
    "diff2d": (2, "gradient"),
}


def _add_run_flags(parser: argparse.ArgumentParser, *, eps_default=None) -> None:
    parser.add_argument("--config", type=Path, help="key = value file prefilling any flag")
    parser.add_argument("--function", choices=["f1", "f2"], default=None)
    parser.add_argument("--a", type=float, default=None, help="sharpness parameter")
    parser.add_argument("--m", type=int, default=None, help="polynomial degree")
    parser.add_argument("--mu", type=int, default=None, help="degree extension for the estimate")
    parser.add_argument("--n", type=int, default=None, help="stencil size (default M_(d,m+mu))")
    parser.add_argument("--eps", type=float, default=eps_default, help="local tolerance")
    parser.add_argument("--seed", type=int, default=None, help="seed for random shifts")
    parser.add_argument(
        "--shifts",
        default=None,
        help="explicit shifts as comma/semicolon lists, e.g. '0.1;0.4' or '0.1,0.2;0.3,-0.4'",
    )
    parser.add_argument("--reference-shifts", action="store_true", help="use the frozen demo shifts")
    parser.add_argument("--l-max", type=int, default=None)
    parser.add_argument("--n-cap", type=int, default=None)
    parser.add_argument("--count-per-axis", type=int, default=None)
    parser.add_argument("--dirty-policy", choices=["neighbors", "violations"], default=None)
    parser.add_argument("--on-singular", choices=["refine", "raise"], default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--skip-actual", action="store_true", help="skip per-point exact errors")
    parser.add_argument("--outdir", type=Path, default=None)


def _read_config_file(path: Path) -> dict[str, str]:
    values = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_TYPES = {
    "function": str,
    "a": float,
    "m": int,
    "mu": int,
    "n": int,
    "eps": float,
    "seed": int,
    "shifts": str,
    "l_max": int,
    "n_cap": int,
    "count_per_axis": int,
    "dirty_policy": str,
    "on_singular": str,
    "workers": int,
    "outdir": Path,
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if args.config is None:
        return args
    if not args.config.is_file():
        raise ConfigError(f"config file {args.config} not found")
    for key, raw in _read_config_file(args.config).items():
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            try:
                setattr(args, key, _CONFIG_TYPES[key](raw))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return args


def _parse_shifts(text: str, d: int) -> np.ndarray:
    rows = [chunk for chunk in text.replace("|", ";").split(";") if chunk.strip()]
    return np.array([[float(tok) for tok in row.split(",")] for row in rows]).reshape(-1, d)


def _build_function(args, d: int) -> TestFunction:
    kind = args.function or "f2"
    a = args.a if args.a is not None else 1000.0
    if args.shifts is not None:
        return TestFunction(kind=kind, a=a, shifts=_parse_shifts(args.shifts, d))
    if args.reference_shifts or args.seed is None:
        return reference_function(kind, a, d)
    return make_test_function(kind, a, d, args.seed)


def _outdir(args) -> Path:
    if args.outdir is not None:
        return args.outdir
    env = os.environ.get("RBFADAPT_OUTDIR")
    return Path(env) if env else Path("rbfadapt-out")


def _cmd_run(name: str, args) -> int:
    d, operator = _RUN_COMMANDS[name]
    args = _merge_config(args)
    if args.eps is None:
        raise ConfigError("--eps is required")
    tf = _build_function(args, d)
    overrides = {
        key: getattr(args, key)
        for key in ("mu", "n", "l_max", "n_cap", "count_per_axis", "dirty_policy", "on_singular", "workers")
        if getattr(args, key) is not None
    }
    config = AdaptiveConfig(
        d=d,
        operator=operator,
        m=args.m if args.m is not None else (1 if d == 1 else 4),
        eps=args.eps,
        **overrides,
    )
    if args.skip_actual:
        oracle = None
    elif operator == "quadrature":
        oracle = tf.cell_integral
    else:
        oracle = tf.gradient
    exact = tf.integral() if operator == "quadrature" else None
    report = run_adaptive(tf.eval, config, oracle=oracle, exact_value=exact)
    outdir = _outdir(args)
    paths = csvio.write_report(outdir, report)
    err = "n/a" if report.global_error is None else f"{report.global_error:.3e}"
    value = "n/a" if report.global_value is None else f"{report.global_value:.12g}"
    print(
        f"{name}: N={report.n_nodes} levels={report.levels_used} "
        f"termination={report.termination} value={value} error={err}"
    )
    print("artifacts: " + ", ".join(str(p) for p in paths.values()))
    return 0


def _cmd_sweep(args) -> int:
    args = _merge_config(args)
    import csv as _csv

    a_grid = [float(x) for x in args.a_grid.split(",")]
    eps_grid = [float(x) for x in args.eps_grid.split(",")]
    functions = args.functions.split(",")
    outdir = _outdir(args)
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "sweep.csv"
    with open(out, "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["function", "a", "eps", "seed", "n_nodes", "error", "termination"])
        for kind in functions:
            for a in a_grid:
                for eps in eps_grid:
                    for seed in range(args.seeds):
                        tf = make_test_function(kind, a, args.d, seed)
                        config = AdaptiveConfig(
                            d=args.d,
                            operator="quadrature" if args.operator == "quad" else args.operator,
                            m=args.m,
                            eps=eps,
                            workers=args.workers or None,
                        )
                        exact = tf.integral() if config.operator == "quadrature" else None
                        report = run_adaptive(tf.eval, config, exact_value=exact)
                        err = report.global_error
                        writer.writerow(
                            [
                                kind,
                                format(a, ".17g"),
                                format(eps, ".17g"),
                                seed,
                                report.n_nodes,
                                "" if err is None else format(err, ".17g"),
                                report.termination,
                            ]
                        )
    print(f"sweep: wrote {out}")
    return 0


def _cmd_bench(args) -> int:
    rows = bench.run_timing_benchmark(
        [int(x) for x in args.d_list.split(",")],
        [int(x) for x in args.m_list.split(",")],
        [int(x) for x in args.mu_list.split(",")],
        reps=args.reps,
    )
    outdir = _outdir(args)
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "timing.csv"
    bench.write_timing_csv(out, rows)
    print(f"{'d':>2} {'m':>2} {'mu':>3} {'n':>4} {'tau_m':>10} {'tau_mmu':>10} {'tau_ext':>10} {'full/m':>7} {'ext/m':>7}")
    for r in rows:
        print(
            f"{r.d:>2} {r.m:>2} {r.mu:>3} {r.n:>4} "
            f"{r.tau_m*1e6:>9.1f}u {r.tau_mmu*1e6:>9.1f}u {r.tau_ext*1e6:>9.1f}u "
            f"{r.ratio_full:>7.2f} {r.ratio_ext:>7.2f}"
        )
    print(f"bench-timing: wrote {out}")
    return 0


def _cmd_trapz(args) -> int:
    args = _merge_config(args)
    if args.eps is None:
        raise ConfigError("--eps is required")
    tf = _build_function(args, 1)
    value, nodes, mids, estimates = adaptive_trapezoid_detailed(tf.eval, -1.0, 1.0, args.eps)
    exact = tf.integral()
    outdir = _outdir(args)
    outdir.mkdir(parents=True, exist_ok=True)
    import csv as _csv

    node_set = NodeSet(1)
    for x in nodes:
        node_set.add([x])
    write_nodes_csv(outdir / "nodes.csv", node_set, f_values=tf.eval(node_set.points))
    with open(outdir / "errors.csv", "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["id", "x", "estimate", "actual", "level"])
        for i, (x, est) in enumerate(zip(mids, estimates)):
            writer.writerow([i, format(x, ".17g"), format(est, ".17g"), "", ""])
    with open(outdir / "summary.csv", "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["termination", "n_nodes", "levels", "global_value", "global_error"])
        writer.writerow(
            ["converged", len(nodes), "", format(value, ".17g"), format(abs(value - exact), ".17g")]
        )
    print(f"trapz-baseline: value={value:.12g} error={abs(value-exact):.3e} nodes={len(nodes)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbfadapt",
        description="Adaptive kernel-based quadrature and differentiation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUN_COMMANDS:
        p = sub.add_parser(name, help=f"adaptive {name} run")
        _add_run_flags(p)
    p = sub.add_parser("sweep", help="grid of runs over (a, eps, seed)")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--operator", choices=["quad", "derivative", "gradient"], default="quad")
    p.add_argument("--functions", default="f1,f2")
    p.add_argument("--a-grid", default="1,10,100,1000")
    p.add_argument("--eps-grid", default="1e-4,1e-5,1e-6,1e-7")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--outdir", type=Path, default=None)
    p = sub.add_parser("bench-timing", help="degree-extension timing study")
    p.add_argument("--d-list", default="1,2,3")
    p.add_argument("--m-list", default="1,2,3,4")
    p.add_argument("--mu-list", default="1,2,3")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--outdir", type=Path, default=None)
    p = sub.add_parser("trapz-baseline", help="adaptive trapezoid comparison run")
    _add_run_flags(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in _RUN_COMMANDS:
            return _cmd_run(args.command, args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "bench-timing":
            return _cmd_bench(args)
        if args.command == "trapz-baseline":
            return _cmd_trapz(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SingularSystem as exc:
        print(f"singular system: {exc}", file=sys.stderr)
        return 3
    except RbfAdaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
