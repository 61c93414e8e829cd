"""Node sets, tessellations, neighbor queries, and node-insertion strategies.

Nodes live in the closed cube [-1, 1]^d and are deduplicated by coordinate
quantization at 1e-12 (with a neighbor-cell sweep so that near-coincident
points straddling a quantization boundary still merge). Cells are integration
subdomains only, so 2D refinement is deliberately non-conforming: splitting a
triangle leaves hanging nodes on its neighbors' edges, which is harmless for
cubature and avoids cascading re-tessellation.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay as _SciPyDelaunay
from scipy.spatial import QhullError, cKDTree

from .errors import DegenerateInput, InsufficientNodes
from .kernels import Interval, Triangle

QUANT = 1e-12
INITIAL_SPACING = 2.0 / 9.0  # 10 points per axis on [-1, 1]


class NodeSet:
    """A growing set of unique points in [-1, 1]^d with a lazy spatial index."""

    def __init__(self, dim: int):
        if dim not in (1, 2):
            raise ValueError("node sets support d = 1 or 2")
        self.dim = dim
        self._buffer = np.empty((64, dim))
        self._count = 0
        self._keys: dict[tuple[int, ...], int] = {}
        self._tree: cKDTree | None = None
        self._tree_size = 0

    def __len__(self) -> int:
        return self._count

    @property
    def points(self) -> np.ndarray:
        """Read-only view of the stored points; grows as nodes are added."""
        return self._buffer[: self._count]

    def _quant_key(self, point: np.ndarray) -> tuple[int, ...]:
        return tuple(int(round(c / QUANT)) for c in point)

    def find(self, point) -> int | None:
        """Index of a stored point within 1e-12 of ``point``, or None."""
        point = np.asarray(point, dtype=float).reshape(self.dim)
        key = self._quant_key(point)
        hit = self._keys.get(key)
        if hit is not None:
            return hit
        # a near-duplicate may have quantized into an adjacent cell
        for offsets in itertools.product((-1, 0, 1), repeat=self.dim):
            if all(o == 0 for o in offsets):
                continue
            other = self._keys.get(tuple(k + o for k, o in zip(key, offsets)))
            if other is not None and np.linalg.norm(self._buffer[other] - point) <= QUANT:
                return other
        return None

    def add(self, point) -> int:
        """Insert a point (deduplicated); returns its index. Must lie in [-1, 1]^d."""
        point = np.asarray(point, dtype=float).reshape(self.dim)
        if np.any(np.abs(point) > 1.0 + 1e-15):
            raise ValueError(f"point {point.tolist()} lies outside [-1, 1]^{self.dim}")
        existing = self.find(point)
        if existing is not None:
            return existing
        index = self._count
        if index == len(self._buffer):
            grown = np.empty((2 * len(self._buffer), self.dim))
            grown[:index] = self._buffer
            self._buffer = grown
        self._buffer[index] = np.clip(point, -1.0, 1.0)
        self._count = index + 1
        self._keys[self._quant_key(point)] = index
        return index

    def tree(self) -> cKDTree:
        if self._tree is None or self._tree_size != self._count:
            self._tree = cKDTree(self.points, copy_data=True)
            self._tree_size = self._count
        return self._tree


def nearest_neighbors(nodes: NodeSet, query, n: int) -> np.ndarray:
    """Indices of the n nodes nearest to ``query``, closest first.

    Exact distance ties are broken toward the lower node index so repeated
    runs are bit-for-bit reproducible.
    """
    if len(nodes) < n:
        raise InsufficientNodes(f"need {n} nodes, have {len(nodes)}")
    dist, idx = nodes.tree().query(np.asarray(query, dtype=float).reshape(nodes.dim), k=n)
    dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
    order = np.lexsort((idx, dist))
    return idx[order]


def batch_nearest_neighbors(nodes: NodeSet, queries: np.ndarray, n: int) -> np.ndarray:
    """`nearest_neighbors` for many query points; returns an array of index rows."""
    if len(nodes) < n:
        raise InsufficientNodes(f"need {n} nodes, have {len(nodes)}")
    dist, idx = nodes.tree().query(np.asarray(queries, dtype=float).reshape(-1, nodes.dim), k=n)
    if n == 1:
        dist, idx = dist[:, None], idx[:, None]
    order = np.lexsort((idx, dist), axis=1)
    return np.take_along_axis(idx, order, axis=1)


def initial_grid(d: int, count_per_axis: int = 10) -> NodeSet:
    """Tensor grid of count_per_axis**d equally spaced points covering [-1, 1]^d."""
    if d not in (1, 2):
        raise ValueError("initial grids support d = 1 or 2")
    axis = np.linspace(-1.0, 1.0, count_per_axis)
    nodes = NodeSet(d)
    if d == 1:
        for x in axis:
            nodes.add([x])
    else:
        for y in axis:
            for x in axis:
                nodes.add([x, y])
    return nodes


@dataclass
class CellEntry:
    """One tessellation cell: its geometry plus vertex indices into the node set."""

    cell: Interval | Triangle
    vertex_ids: tuple[int, ...]


class Tessellation:
    """Cells with disjoint interiors covering [-1, 1]^d, keyed by stable ids."""

    def __init__(self, dim: int):
        self.dim = dim
        self.cells: dict[int, CellEntry] = {}
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.cells)

    def add(self, cell, vertex_ids) -> int:
        cell_id = self._next_id
        self._next_id += 1
        self.cells[cell_id] = CellEntry(cell=cell, vertex_ids=tuple(int(v) for v in vertex_ids))
        return cell_id

    def remove(self, cell_id: int) -> CellEntry:
        return self.cells.pop(cell_id)

    def total_measure(self) -> float:
        return sum(entry.cell.measure for entry in self.cells.values())

    def barycenters(self) -> tuple[list[int], np.ndarray]:
        ids = list(self.cells)
        if not ids:
            return ids, np.empty((0, self.dim))
        return ids, np.array([self.cells[i].cell.barycenter for i in ids])


def interval_partition(nodes: NodeSet) -> Tessellation:
    """Consecutive intervals between sorted 1D nodes."""
    pts = nodes.points[:, 0]
    order = np.argsort(pts)
    tess = Tessellation(1)
    for left, right in zip(order[:-1], order[1:]):
        tess.add(Interval(pts[left], pts[right]), (left, right))
    return tess


def delaunay(nodes: NodeSet) -> Tessellation:
    """Delaunay triangulation of a 2D node set (Qhull), oriented counterclockwise.

    Raises DegenerateInput when the points are all collinear.
    """
    points = nodes.points
    if len(points) < 3:
        raise DegenerateInput("need at least 3 points to triangulate")
    try:
        tri = _SciPyDelaunay(points)
    except QhullError as exc:
        raise DegenerateInput(f"triangulation failed: {exc}") from None
    if tri.simplices.size == 0:
        raise DegenerateInput("points are collinear")
    tess = Tessellation(2)
    for simplex in tri.simplices:
        tess.add(Triangle(points[simplex]), _oriented(points, simplex))
    return tess


def _oriented(points, simplex):
    a, b, c = (points[i] for i in simplex)
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return tuple(simplex) if cross > 0 else (simplex[0], simplex[2], simplex[1])


@dataclass
class RefinementState:
    """Mutable state of one adaptive run: nodes, cells, and evaluation points."""

    mode: str  # "quadrature" or "differentiation"
    nodes: NodeSet
    tessellation: Tessellation | None = None
    level: int = 0
    eval_node_ids: list[int] = field(default_factory=list)  # differentiation only

    @property
    def dim(self) -> int:
        return self.nodes.dim

    def eval_points(self) -> tuple[list, np.ndarray]:
        """Evaluation keys and locations: barycenters for quadrature, nodes otherwise."""
        if self.mode == "quadrature":
            return self.tessellation.barycenters()
        ids = list(self.eval_node_ids)
        return ids, self.nodes.points[ids]


def initial_state(d: int, mode: str, count_per_axis: int = 10) -> RefinementState:
    nodes = initial_grid(d, count_per_axis)
    if mode == "quadrature":
        tess = interval_partition(nodes) if d == 1 else delaunay(nodes)
        return RefinementState(mode=mode, nodes=nodes, tessellation=tess)
    if mode != "differentiation":
        raise ValueError(f"unknown mode {mode!r}")
    return RefinementState(mode=mode, nodes=nodes, eval_node_ids=list(range(len(nodes))))


def refine_quadrature_cell(state: RefinementState, cell_id: int) -> list[int]:
    """Split one cell, inserting its midpoint nodes; returns the new cell ids.

    1D: the midpoint splits the interval in two. 2D: the barycenter and the
    three edge midpoints are inserted and the triangle is replaced by the six
    triangles of the local midpoint tessellation; neighboring triangles are
    left untouched (hanging nodes are fine for cubature subdomains).
    """
    entry = state.tessellation.remove(cell_id)
    if state.dim == 1:
        cell = entry.cell
        mid_id = state.nodes.add([0.5 * (cell.a + cell.b)])
        left, right = entry.vertex_ids
        return [
            state.tessellation.add(Interval(cell.a, 0.5 * (cell.a + cell.b)), (left, mid_id)),
            state.tessellation.add(Interval(0.5 * (cell.a + cell.b), cell.b), (mid_id, right)),
        ]
    v = entry.cell.vertices
    ia, ib, ic = entry.vertex_ids
    im_ab = state.nodes.add(0.5 * (v[0] + v[1]))
    im_bc = state.nodes.add(0.5 * (v[1] + v[2]))
    im_ca = state.nodes.add(0.5 * (v[2] + v[0]))
    ig = state.nodes.add(v.mean(axis=0))
    pts = state.nodes.points
    children = [
        (ia, im_ab, im_ca),
        (ib, im_bc, im_ab),
        (ic, im_ca, im_bc),
        (im_ab, im_bc, ig),
        (im_bc, im_ca, ig),
        (im_ca, im_ab, ig),
    ]
    return [state.tessellation.add(Triangle(pts[list(tri)]), tri) for tri in children]


def refine_differentiation_point(state: RefinementState, node_id: int) -> list[int]:
    """Insert new nodes around one evaluation node; returns the new node ids.

    1D: midpoints toward the two nearest other nodes. 2D: the eight unique
    points at distance 2/9 / 2^(level+1) along the axes and diagonals;
    candidates outside [-1, 1]^d are discarded.
    """
    center = state.nodes.points[node_id]
    new_ids: list[int] = []
    if state.dim == 1:
        ranked = nearest_neighbors(state.nodes, center, min(3, len(state.nodes)))
        others = [i for i in ranked if i != node_id][:2]
        candidates = [0.5 * (center + state.nodes.points[i]) for i in others]
    else:
        step = INITIAL_SPACING / 2 ** (state.level + 1)
        diag = step * np.sqrt(2.0) / 2.0
        offsets = [
            (step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step),
            (diag, diag), (diag, -diag), (-diag, diag), (-diag, -diag),
        ]
        candidates = [center + np.asarray(o) for o in offsets]
    before = len(state.nodes)
    for cand in candidates:
        if np.any(np.abs(cand) > 1.0):
            continue
        idx = state.nodes.add(cand)
        if idx >= before and idx not in new_ids:
            new_ids.append(idx)
    state.eval_node_ids.extend(new_ids)
    return new_ids


def write_nodes_csv(path, nodes: NodeSet, f_values=None) -> None:
    """Write `nodes.csv`: id, x[, y][, f]. The f column is optional."""
    points = nodes.points
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = ["id", "x"] + (["y"] if nodes.dim == 2 else [])
        if f_values is not None:
            header.append("f")
        writer.writerow(header)
        for i, row in enumerate(points):
            out = [i] + [_fmt(c) for c in row]
            if f_values is not None:
                out.append(_fmt(f_values[i]))
            writer.writerow(out)


def write_cells_csv(path, tess: Tessellation) -> None:
    """Write `cells.csv`: id, vertex ids, measure, barycenter."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if tess.dim == 1:
            writer.writerow(["id", "v0", "v1", "measure", "bx"])
        else:
            writer.writerow(["id", "v0", "v1", "v2", "measure", "bx", "by"])
        for cell_id, entry in tess.cells.items():
            bary = entry.cell.barycenter
            writer.writerow(
                [cell_id, *entry.vertex_ids, _fmt(entry.cell.measure), *(_fmt(c) for c in bary)]
            )


def _fmt(x) -> str:
    return format(float(x), ".17g")
