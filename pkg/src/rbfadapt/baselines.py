"""Reference implementations used for comparison and as test oracles.

`adaptive_trapezoid` is the textbook recursive-bisection trapezoid rule with
the Simpson/trapezoid difference as its local error estimate; it is the
baseline the adaptive kernel method is compared against. The oracle routines
deliberately avoid the block shortcuts of :mod:`rbfadapt.stencils` so they
can serve as independent checks.
"""
from __future__ import annotations

import numpy as np

from .basis import monomial_basis
from .errors import MaxDepth, SingularSystem
from .kernels import Interval, Triangle
from .stencils import OperatorSpec, Stencil, operator_rhs

TRAPEZOID_MAX_DEPTH = 60


def _trapezoid_intervals(f, a: float, b: float, eps: float) -> list[tuple]:
    """Accepted subintervals (lo, hi, trapezoid value, |Simpson - trapezoid|)."""
    if not b > a:
        raise ValueError("need a < b")
    if not eps > 0:
        raise ValueError("need eps > 0")
    span = b - a
    accepted = []
    stack = [(a, b, float(f(a)), float(f(b)), 0)]
    while stack:
        lo, hi, flo, fhi, depth = stack.pop()
        if depth > TRAPEZOID_MAX_DEPTH:
            raise MaxDepth(
                f"trapezoid bisection exceeded depth {TRAPEZOID_MAX_DEPTH} near x={lo:.6g}"
            )
        mid = 0.5 * (lo + hi)
        fmid = float(f(mid))
        width = hi - lo
        trap = 0.5 * width * (flo + fhi)
        simpson = width * (flo + 4.0 * fmid + fhi) / 6.0
        if abs(simpson - trap) <= eps * width / span:
            accepted.append((lo, hi, trap, abs(simpson - trap)))
        else:
            stack.append((lo, mid, flo, fmid, depth + 1))
            stack.append((mid, hi, fmid, fhi, depth + 1))
    return accepted


def adaptive_trapezoid(f, a: float, b: float, eps: float) -> tuple[float, int]:
    """Adaptive trapezoid value of the integral of f over [a, b] and its node count.

    A subinterval [lo, hi] is accepted when |Simpson - trapezoid| on it is at
    most eps * (hi - lo) / (b - a); otherwise it is bisected. The returned
    count is the number of nodes in the final composite rule (the endpoints
    of the accepted subintervals); midpoint probes that only feed the
    estimate are not counted.
    """
    intervals = _trapezoid_intervals(f, a, b, eps)
    return sum(entry[2] for entry in intervals), len(intervals) + 1


def adaptive_trapezoid_detailed(f, a: float, b: float, eps: float):
    """Like `adaptive_trapezoid` but also returns the composite-rule nodes and
    the per-interval (midpoint, estimate) pairs, for CSV emission."""
    intervals = sorted(_trapezoid_intervals(f, a, b, eps))
    value = sum(entry[2] for entry in intervals)
    nodes = np.array([lo for lo, *_ in intervals] + [b])
    mids = np.array([(lo + hi) / 2 for lo, hi, *_ in intervals])
    estimates = np.array([est for *_, est in intervals])
    return value, nodes, mids, estimates


def adaptive_line_integral(
    f, a: float, b: float, rtol: float = 1e-12, atol: float = 1e-15, max_depth: int = 48
) -> float:
    """High-accuracy 1D integral by bisected Gauss panels with Richardson acceptance."""
    x, w = np.polynomial.legendre.leggauss(8)

    def panel(lo, hi):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        return half * float(np.dot(w, [f(mid + half * t) for t in x]))

    def recurse(lo, hi, whole, depth):
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        if abs(left + right - whole) <= max(rtol * abs(left + right), atol):
            return left + right + (left + right - whole) / 255.0
        if depth >= max_depth:
            raise MaxDepth("line integral did not converge")
        return recurse(lo, mid, left, depth + 1) + recurse(mid, hi, right, depth + 1)

    return recurse(a, b, panel(a, b), 0)


def oracle_integral(
    f, cell, rtol: float = 1e-12, atol: float = 1e-15, max_levels: int = 11
) -> float:
    """Brute-force cell integral: subdivision with Richardson extrapolation.

    Intervals use bisected Gauss panels. Triangles use the centroid rule on
    uniform 4-way subdivisions, accelerated by extrapolating the level table
    (the centroid rule has an even error expansion in the mesh width).
    """
    if isinstance(cell, Interval):
        return adaptive_line_integral(lambda t: f(np.array([t])), cell.a, cell.b, rtol, atol)
    if not isinstance(cell, Triangle):
        raise TypeError(f"unsupported cell type {type(cell).__name__}")
    tris = cell.vertices[np.newaxis, :, :]
    table: list[float] = []
    previous = None
    for level in range(max_levels + 1):
        centroids = tris.mean(axis=1)
        e1 = tris[:, 1] - tris[:, 0]
        e2 = tris[:, 2] - tris[:, 0]
        areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        values = np.asarray(f(centroids), dtype=float)
        table.append(float(np.dot(areas, values)))
        # Richardson: eliminate h^2, h^4, ... from the subdivision sequence
        row = table[:]
        for j in range(1, len(row)):
            for i in range(len(row) - 1, j - 1, -1):
                factor = 4.0**j
                row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0)
        best = row[-1]
        if previous is not None and abs(best - previous) <= max(rtol * abs(best), atol):
            return best
        previous = best
        if level < max_levels:
            a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
            ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
            tris = np.concatenate(
                [
                    np.stack([a, ab, ca], axis=1),
                    np.stack([b, bc, ab], axis=1),
                    np.stack([c, ca, bc], axis=1),
                    np.stack([ab, bc, ca], axis=1),
                ]
            )
    raise MaxDepth(f"triangle integral did not reach rtol={rtol} in {max_levels} levels")


def oracle_full_solve(stencil: Stencil, op: OperatorSpec, degree: int) -> np.ndarray:
    """Operator weights by direct assembly of the degree-``degree`` saddle system.

    No factorization reuse, no block elimination; used as the equivalence
    oracle for the extension shortcut.
    """
    nodes = stencil.nodes
    n = stencil.n
    basis = monomial_basis(stencil.d, degree)
    diffs = nodes[:, np.newaxis, :] - nodes[np.newaxis, :, :]
    phi = np.linalg.norm(diffs, axis=2) ** 3
    p = basis.vandermonde(stencil.center, nodes)
    size = n + len(basis)
    matrix = np.zeros((size, size))
    matrix[:n, :n] = phi
    matrix[:n, n:] = p
    matrix[n:, :n] = p.T
    rhs = operator_rhs(op, stencil, degree)
    try:
        solution = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError:
        raise SingularSystem(
            f"direct degree-{degree} system is singular at {stencil.center.tolist()}"
        ) from None
    return solution[:n]
