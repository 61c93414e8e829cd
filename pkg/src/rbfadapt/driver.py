"""The adaptive refinement loop.

Each level finds the n nearest nodes of every evaluation point, recomputes
weights wherever that neighborhood changed (or the point is new), and refines
around the points whose two-degree error estimate exceeds the tolerance. The
loop stops when no neighborhood changed, when the level budget is exhausted,
or when the node cap fires. Reported approximations are always the degree-m
values, per evaluation point; the degree-(m+mu) solve only feeds the
estimate.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import count_monomials
from .errors import ConfigError, DegenerateExtension, IllConditioned, SingularSystem
from .geometry import (
    NodeSet,
    RefinementState,
    batch_nearest_neighbors,
    initial_state,
    interval_partition,
    nearest_neighbors,
    refine_differentiation_point,
    refine_quadrature_cell,
)
from .stencils import (
    Derivative,
    Gradient,
    IntegralOver,
    Stencil,
    assemble_system,
    error_estimate,
    extend_weights,
    solve_weights,
    WeightPair,
)

OPERATORS = ("quadrature", "derivative", "gradient")
DEFAULT_NODE_CAP = int(10**5.5)
EXTENSION_CONDITION_LIMIT = 1e12


@dataclass
class AdaptiveConfig:
    d: int
    operator: str
    m: int
    eps: float
    mu: int = 2
    n: int | None = None
    l_max: int = 40
    n_cap: int = DEFAULT_NODE_CAP
    count_per_axis: int = 10
    dirty_policy: str = "neighbors"  # or "violations": skip unchanged-estimate points
    on_singular: str = "refine"  # or "raise": propagate SingularSystem immediately
    workers: int | None = None

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ConfigError(f"d must be 1 or 2, got {self.d}")
        if self.operator not in OPERATORS:
            raise ConfigError(f"operator must be one of {OPERATORS}, got {self.operator!r}")
        if self.operator == "derivative" and self.d != 1:
            raise ConfigError("the scalar derivative operator is 1D; use 'gradient' for d=2")
        if self.mu < 1:
            raise ConfigError("mu must be >= 1")
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        needed = count_monomials(self.d, self.m + self.mu)
        if self.n is None:
            self.n = needed
        if self.n < needed:
            raise ConfigError(f"n must be at least M_(d,m+mu) = {needed}, got {self.n}")
        if self.dirty_policy not in ("neighbors", "violations"):
            raise ConfigError(f"unknown dirty policy {self.dirty_policy!r}")
        if self.on_singular not in ("refine", "raise"):
            raise ConfigError(f"unknown singular-system policy {self.on_singular!r}")
        if self.workers is None:
            self.workers = os.cpu_count() or 1

    @property
    def mode(self) -> str:
        return "quadrature" if self.operator == "quadrature" else "differentiation"


@dataclass
class PointRecord:
    key: int
    location: np.ndarray
    value: np.ndarray
    estimate: float
    level: int
    neighbor_ids: tuple[int, ...]
    measure: float | None = None
    actual: float | None = None


@dataclass
class LevelTrace:
    level: int
    eval_points: int
    dirty: int
    refined: int
    nodes_after: int


@dataclass
class AdaptiveReport:
    config: AdaptiveConfig
    records: list[PointRecord]
    termination: str
    levels_used: int
    n_nodes: int
    n_history: list[int]
    trace: list[LevelTrace]
    state: RefinementState
    f_values: np.ndarray
    ill_conditioned_count: int = 0
    singular_count: int = 0
    global_value: float | None = None
    exact_value: float | None = None
    global_error: float | None = None

    def estimates(self) -> np.ndarray:
        return np.array([r.estimate for r in self.records])

    def actuals(self) -> np.ndarray:
        return np.array([np.nan if r.actual is None else r.actual for r in self.records])


class _Run:
    """Working state of one adaptive run."""

    def __init__(self, f, config: AdaptiveConfig):
        self.f = f
        self.config = config
        self.state = initial_state(config.d, config.mode, config.count_per_axis)
        self.records: dict[int, PointRecord] = {}
        self.f_values = np.empty(0)
        self.ill_conditioned = 0
        self.singular = 0
        self._fill_values()

    def _fill_values(self):
        points = self.state.nodes.points
        have = len(self.f_values)
        if len(points) > have:
            new = np.atleast_1d(np.asarray(self.f(points[have:]), dtype=float))
            self.f_values = np.concatenate([self.f_values, new])

    def _operator_for(self, key):
        if self.config.operator == "quadrature":
            return IntegralOver(self.state.tessellation.cells[key].cell)
        if self.config.operator == "derivative":
            return Derivative((1,))
        return Gradient(self.config.d)

    def _solve_stencil(self, key, location, row):
        """Value and estimate on one neighborhood; raises on degeneracy."""
        nodes = self.state.nodes.points[row]
        stencil = Stencil(center=location, nodes=nodes, m=self.config.m, mu=self.config.mu)
        op = self._operator_for(key)
        system = assemble_system(stencil)
        w_m = solve_weights(system, op, stencil)
        values = self.f_values[row]
        value = np.atleast_1d(values @ w_m)
        w_mmu = extend_weights(
            system, w_m, op, stencil, max_condition=EXTENSION_CONDITION_LIMIT
        )
        estimate = error_estimate(WeightPair(w_m=w_m, w_mmu=w_mmu), values)
        return value, estimate

    def _solve_one(self, key, location, neighbor_row):
        """Solve one evaluation point, widening the neighborhood if degenerate.

        Every interior stencil of a uniformly spaced patch is rank deficient
        at degree m+mu (the n nearest nodes span too few lattice lines), so
        the n-nearest neighborhood cannot always certify an estimate. Such
        stencils are retried with progressively more neighbors; the extension
        formula is valid for any n >= M_(d,m+mu). If no usable neighborhood
        exists within the growth cap, the point keeps an infinite estimate,
        which forces refinement around it.
        """
        base_n = self.config.n
        n_comp = 1 if self.config.operator in ("quadrature", "derivative") else self.config.d
        row = neighbor_row
        attempt = 0
        while True:
            try:
                value, estimate = self._solve_stencil(key, location, row)
                break
            except (SingularSystem, DegenerateExtension) as exc:
                attempt += 1
                wider = base_n + attempt * (attempt + 1) * 4
                if wider > min(3 * base_n + 16, len(self.state.nodes)):
                    if isinstance(exc, SingularSystem) and self.config.on_singular == "raise":
                        raise SingularSystem(
                            f"level {self.state.level}, evaluation point {key} at "
                            f"{np.asarray(location).tolist()}: {exc}"
                        ) from exc
                    self.singular += 1
                    value = np.full(n_comp, np.nan)
                    estimate = np.inf
                    break
                row = nearest_neighbors(self.state.nodes, location, wider)
        return self._make_record(key, location, neighbor_row, value, estimate)

    def _make_record(self, key, location, neighbor_row, value, estimate):
        measure = None
        if self.config.operator == "quadrature":
            measure = self.state.tessellation.cells[key].cell.measure
        record = PointRecord(
            key=key,
            location=np.array(location, dtype=float),
            value=value,
            estimate=estimate,
            level=self.state.level,
            neighbor_ids=tuple(sorted(int(i) for i in neighbor_row)),
            measure=measure,
        )
        return record

    def dirty_keys(self, keys, neighbor_rows):
        dirty = []
        for key, row in zip(keys, neighbor_rows):
            ids = tuple(sorted(int(i) for i in row))
            old = self.records.get(key)
            if old is None:
                dirty.append((key, row))
            elif old.neighbor_ids != ids:
                if self.config.dirty_policy == "neighbors" or old.estimate > self.config.eps:
                    dirty.append((key, row))
        return dirty

    def solve_batch(self, dirty, locations):
        def work(item):
            (key, row), loc = item
            return self._solve_one(key, loc, row)

        items = list(zip(dirty, locations))
        # catch_warnings swaps global state, so it wraps the whole batch;
        # worker threads then append into the same recording list.
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IllConditioned)
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            if self.config.workers > 1 and len(items) > 8:
                chunk = max(1, len(items) // (4 * self.config.workers))
                with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                    results = list(pool.map(work, items, chunksize=chunk))
            else:
                results = [work(item) for item in items]
        self.ill_conditioned += sum(
            1 for w in caught if issubclass(w.category, IllConditioned)
        )
        for record in results:
            self.records[record.key] = record

    def refine(self, keys) -> None:
        for key in sorted(keys):
            if self.config.operator == "quadrature":
                self.records.pop(key, None)
                refine_quadrature_cell(self.state, key)
            else:
                refine_differentiation_point(self.state, key)
        self._fill_values()


def run_adaptive(f, config: AdaptiveConfig, oracle=None, exact_value=None) -> AdaptiveReport:
    """Run the adaptive loop; see the module docstring for the schedule.

    ``f`` maps an array of points (k, d) to values (k,). ``oracle`` is
    optional ground truth for the per-point error columns: for quadrature a
    callable cell -> exact integral, otherwise point -> exact derivative or
    gradient. ``exact_value`` is the exact global integral, if known.
    """
    run = _Run(f, config)
    trace: list[LevelTrace] = []
    n_history: list[int] = [len(run.state.nodes)]
    termination = "level_cap"
    while run.state.level <= config.l_max:
        keys, locations = run.state.eval_points()
        rows = batch_nearest_neighbors(run.state.nodes, locations, config.n)
        key_order = {k: i for i, k in enumerate(keys)}
        dirty = run.dirty_keys(keys, rows)
        if not dirty:
            termination = "converged"
            trace.append(LevelTrace(run.state.level, len(keys), 0, 0, len(run.state.nodes)))
            break
        run.solve_batch(dirty, [locations[key_order[k]] for k, _ in dirty])
        violating = [k for k, _ in dirty if run.records[k].estimate > config.eps]
        run.refine(violating)
        trace.append(
            LevelTrace(run.state.level, len(keys), len(dirty), len(violating), len(run.state.nodes))
        )
        n_history.append(len(run.state.nodes))
        if not violating:
            termination = "converged"
            break
        if len(run.state.nodes) > config.n_cap:
            termination = "node_cap"
            break
        run.state.level += 1
    if termination in ("level_cap", "node_cap"):
        _completion_pass(run)
    return _build_report(run, trace, n_history, termination, oracle, exact_value)


def _completion_pass(run: _Run) -> None:
    """Evaluate points created by the final refinement, without refining further."""
    keys, locations = run.state.eval_points()
    missing = [(k, loc) for k, loc in zip(keys, locations) if k not in run.records]
    if not missing:
        return
    rows = batch_nearest_neighbors(
        run.state.nodes, np.array([loc for _, loc in missing]), run.config.n
    )
    run.solve_batch([(k, row) for (k, _), row in zip(missing, rows)], [loc for _, loc in missing])


def _build_report(run, trace, n_history, termination, oracle, exact_value) -> AdaptiveReport:
    keys, _ = run.state.eval_points()
    records = [run.records[k] for k in keys]
    if oracle is not None:
        for record in records:
            if run.config.operator == "quadrature":
                truth = oracle(run.state.tessellation.cells[record.key].cell)
            else:
                truth = oracle(record.location)
            record.actual = float(
                np.linalg.norm(np.atleast_1d(record.value) - np.atleast_1d(truth))
            )
    report = AdaptiveReport(
        config=run.config,
        records=records,
        termination=termination,
        levels_used=trace[-1].level if trace else 0,
        n_nodes=len(run.state.nodes),
        n_history=n_history,
        trace=trace,
        state=run.state,
        f_values=run.f_values,
        ill_conditioned_count=run.ill_conditioned,
        singular_count=run.singular,
        exact_value=exact_value,
    )
    if run.config.operator == "quadrature":
        report.global_value = float(sum(r.value[0] for r in records))
        if exact_value is not None:
            report.global_error = abs(report.global_value - exact_value)
    elif oracle is not None:
        actuals = report.actuals()
        report.global_error = float(np.nanmax(actuals)) if len(actuals) else None
    return report


def evaluate_final(report: AdaptiveReport, queries) -> np.ndarray:
    """The stored degree-m approximations at the given evaluation points.

    Each query must coincide (to 1e-12) with one of the run's evaluation
    points: cell barycenters for quadrature, nodes for differentiation.
    """
    queries = np.asarray(queries, dtype=float).reshape(-1, report.config.d)
    lookup = {tuple(int(round(c / 1e-12)) for c in r.location): r for r in report.records}
    out = np.empty((len(queries), len(report.records[0].value)))
    for i, q in enumerate(queries):
        record = lookup.get(tuple(int(round(c / 1e-12)) for c in q))
        if record is None:
            raise KeyError(f"no evaluation point at {q.tolist()}")
        out[i] = record.value
    return out


def static_quadrature(f, nodes_1d, m: int, mu: int = 2) -> float:
    """Composite quadrature over the partition induced by a fixed 1D node set.

    No adaptivity: one stencil of the M_(1,m+mu) nearest nodes per interval.
    Used for convergence studies on uniform grids.
    """
    points = np.sort(np.asarray(nodes_1d, dtype=float).reshape(-1))
    node_set = NodeSet(1)
    for x in points:
        node_set.add([x])
    tess = interval_partition(node_set)
    n = count_monomials(1, m + mu)
    values = np.atleast_1d(np.asarray(f(node_set.points), dtype=float))
    ids, centers = tess.barycenters()
    rows = batch_nearest_neighbors(node_set, centers, n)
    total = 0.0
    for cell_id, center, row in zip(ids, centers, rows):
        stencil = Stencil(center=center, nodes=node_set.points[row], m=m, mu=mu)
        system = assemble_system(stencil)
        w = solve_weights(system, IntegralOver(tess.cells[cell_id].cell), stencil)
        total += float(values[row] @ w[:, 0])
    return total
