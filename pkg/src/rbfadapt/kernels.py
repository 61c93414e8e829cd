"""The cubic polyharmonic kernel and its operator actions on cells.

Everything an operator right-hand side needs lives here: pointwise kernel
values, first derivatives, and definite integrals (moments) of the kernel and
of shifted monomials over 1D intervals and 2D triangles.

Kernel moments over triangles are computed in closed form by reducing the
area integral to edge integrals (divergence theorem: div(r^3 (x-c)) = 5 r^3,
and (x-c).n is constant along each edge), which is exact to roundoff and
orders of magnitude faster than cubature. A cubature fallback with agreement
checking (`kernel_moment_quadrature`) is kept as an independent route and is
cross-validated against the closed form in the test suite.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .basis import MultiIndexBasis, multi_index_degree
from .errors import NonConvergedMoment, UnsupportedOrder

_DEGENERACY_REL = 1e-15


class Interval:
    """A 1D cell [a, b] with positive length."""

    dim = 1

    def __init__(self, a: float, b: float):
        a, b = float(a), float(b)
        if not b - a > 0.0:
            raise ValueError(f"interval [{a}, {b}] has non-positive length")
        self.a = a
        self.b = b

    @property
    def measure(self) -> float:
        return self.b - self.a

    @property
    def barycenter(self) -> np.ndarray:
        return np.array([0.5 * (self.a + self.b)])

    def split(self):
        mid = 0.5 * (self.a + self.b)
        return Interval(self.a, mid), Interval(mid, self.b)

    def __repr__(self) -> str:
        return f"Interval({self.a}, {self.b})"


class Triangle:
    """A 2D cell with positive area; vertices are stored counterclockwise."""

    dim = 2

    def __init__(self, vertices):
        vertices = np.array(vertices, dtype=float)
        if vertices.shape != (3, 2):
            raise ValueError("triangle needs 3 vertices in the plane")
        signed = _signed_area(vertices)
        if signed < 0.0:
            vertices = vertices[::-1]
            signed = -signed
        span = vertices.max(axis=0) - vertices.min(axis=0)
        bbox = float(span[0] * span[1])
        if signed <= _DEGENERACY_REL * max(bbox, np.finfo(float).tiny):
            raise ValueError("triangle is degenerate (area too small)")
        self.vertices = vertices
        self._area = signed

    @property
    def measure(self) -> float:
        return self._area

    @property
    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def split(self):
        """Uniform 4-way midpoint subdivision."""
        v = self.vertices
        m01 = 0.5 * (v[0] + v[1])
        m12 = 0.5 * (v[1] + v[2])
        m20 = 0.5 * (v[2] + v[0])
        return (
            Triangle([v[0], m01, m20]),
            Triangle([v[1], m12, m01]),
            Triangle([v[2], m20, m12]),
            Triangle([m01, m12, m20]),
        )

    def __repr__(self) -> str:
        return f"Triangle({self.vertices.tolist()})"


def _signed_area(vertices: np.ndarray) -> float:
    e1 = vertices[1] - vertices[0]
    e2 = vertices[2] - vertices[0]
    return 0.5 * float(e1[0] * e2[1] - e1[1] * e2[0])


def kernel_eval(center, x) -> np.ndarray | float:
    """phi(||x - center||) with phi(r) = r^3; x may be one point or rows of points."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    pts = x.reshape(1, -1) if single else x
    r = np.linalg.norm(pts - center.reshape(1, -1), axis=1)
    return float(r[0] ** 3) if single else r**3


def kernel_derivative(center, x0, alpha) -> float:
    """First partial of phi(||x - center||) at x0; 0 at x0 = center (the limit)."""
    if multi_index_degree(alpha) != 1:
        raise UnsupportedOrder(f"only first derivatives are supported, got alpha={tuple(alpha)}")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    j = int(np.argmax(np.asarray(alpha)))
    diff = x0 - center
    r = float(np.linalg.norm(diff))
    return 3.0 * r * float(diff[j])


def kernel_gradients(centers, x0) -> np.ndarray:
    """Gradient of phi(||x - c||) at x0 for each center c; rows are centers."""
    centers = np.asarray(centers, dtype=float)
    centers = centers.reshape(len(centers), -1)
    diff = np.asarray(x0, dtype=float).reshape(1, -1) - centers
    r = np.linalg.norm(diff, axis=1, keepdims=True)
    return 3.0 * r * diff


def kernel_moment(center, cell) -> float:
    """Integral of ||x - center||^3 over the cell, exact to roundoff."""
    return float(kernel_moments(np.atleast_2d(np.asarray(center, dtype=float)), cell)[0])


def kernel_moments(centers, cell) -> np.ndarray:
    """`kernel_moment` for many centers at once; centers has one row per center."""
    centers = np.asarray(centers, dtype=float)
    if isinstance(cell, Interval):
        c = centers.reshape(-1)
        return _quartic(cell.b - c) - _quartic(cell.a - c)
    if isinstance(cell, Triangle):
        return _triangle_kernel_moments(centers.reshape(-1, 2), cell.vertices)
    raise TypeError(f"unsupported cell type {type(cell).__name__}")


def _quartic(u: np.ndarray) -> np.ndarray:
    # antiderivative of |u|^3
    return 0.25 * u**3 * np.abs(u)


def _triangle_kernel_moments(centers: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    total = np.zeros(len(centers))
    for i in range(3):
        p, q = vertices[i], vertices[(i + 1) % 3]
        edge = q - p
        length = float(np.hypot(edge[0], edge[1]))
        tangent = edge / length
        normal = np.array([edge[1], -edge[0]]) / length
        rel = p - centers
        dist = rel @ normal  # signed distance center -> edge line, constant on the edge
        u0 = rel @ tangent
        u1 = u0 + length
        rho = np.abs(dist)
        live = rho > 0.0  # edges through the center contribute exactly zero
        if np.any(live):
            seg = _edge_cubic_integral(u1[live], rho[live]) - _edge_cubic_integral(
                u0[live], rho[live]
            )
            total[live] += dist[live] * seg
    return total / 5.0


def _edge_cubic_integral(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    # antiderivative of (u^2 + rho^2)^(3/2) for rho > 0
    s = np.sqrt(u**2 + rho**2)
    return 0.25 * u * s**3 + 0.375 * rho**2 * (u * s + rho**2 * np.arcsinh(u / rho))


@lru_cache(maxsize=None)
def _symmetric_triangle_rule(order: int = 12):
    """A fixed triangle rule, symmetrized over vertex rotations.

    Built from a Gauss-Legendre product rule under the Duffy map of the unit
    square onto the reference simplex, then averaged over the three cyclic
    relabelings of the barycentric coordinates. Returned as barycentric
    coordinates and weights that sum to one.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    lam2 = (u * (1.0 - v)).ravel()
    lam3 = (u * v).ravel()
    weights = (wu * wv * u).ravel() * 2.0  # normalize: reference area is 1/2
    lam1 = 1.0 - lam2 - lam3
    bary = np.column_stack([lam1, lam2, lam3])
    bary = np.concatenate([bary, bary[:, [1, 2, 0]], bary[:, [2, 0, 1]]])
    weights = np.concatenate([weights, weights, weights]) / 3.0
    bary.setflags(write=False)
    weights.setflags(write=False)
    return bary, weights


def kernel_moment_quadrature(center, cell, rtol: float = 1e-13, max_levels: int = 12) -> float:
    """Kernel moment by a fixed high-degree rule with uniform 4-way subdivision.

    Successive uniform refinements are compared until they agree to ``rtol``
    relative; raises NonConvergedMoment past ``max_levels`` refinements.
    Intended as an independent cross-check of the closed-form moment.
    """
    center = np.asarray(center, dtype=float)
    if isinstance(cell, Interval):
        return kernel_moment(center, cell)
    bary, weights = _symmetric_triangle_rule()
    tris = cell.vertices[np.newaxis, :, :]
    previous = None
    for _ in range(max_levels + 1):
        pts = np.einsum("pj,tjd->tpd", bary, tris)
        r = np.linalg.norm(pts - center.reshape(1, 1, 2), axis=2)
        e1 = tris[:, 1] - tris[:, 0]
        e2 = tris[:, 2] - tris[:, 0]
        areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        value = float(np.sum(areas[:, np.newaxis] * weights[np.newaxis, :] * r**3))
        if previous is not None and abs(value - previous) <= rtol * abs(value):
            return value
        previous = value
        tris = _subdivide_all(tris)
    raise NonConvergedMoment(
        f"moment did not reach rtol={rtol} within {max_levels} subdivision levels"
    )


def _subdivide_all(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.concatenate(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([b, bc, ab], axis=1),
            np.stack([c, ca, bc], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ]
    )


@lru_cache(maxsize=None)
def _shift_expansion(p: int, q: int):
    """Term table for integrating (a0+a1*u+a2*v)^p (b0+b1*u+b2*v)^q over the simplex.

    Each term couples a trinomial expansion of the x-factor with one of the
    y-factor; the u, v powers integrate to j! k! / (j + k + 2)!.
    """
    from math import factorial

    def trinomial(n):
        out = []
        for i in range(n + 1):
            for j in range(n - i + 1):
                k = n - i - j
                out.append((factorial(n) // (factorial(i) * factorial(j) * factorial(k)), i, j, k))
        return out

    rows = []
    for c1, i1, j1, k1 in trinomial(p):
        for c2, i2, j2, k2 in trinomial(q):
            ju, kv = j1 + j2, k1 + k2
            simplex = factorial(ju) * factorial(kv) / factorial(ju + kv + 2)
            rows.append((c1 * c2 * simplex, i1, j1, k1, i2, j2, k2))
    coef = np.array([r[0] for r in rows])
    powers = np.array([r[1:] for r in rows], dtype=np.int64)
    coef.setflags(write=False)
    powers.setflags(write=False)
    return coef, powers


def monomial_moment(center, alpha, cell) -> float:
    """Integral of (x - center)**alpha over the cell, exact."""
    alpha = tuple(int(a) for a in alpha)
    if isinstance(cell, Interval):
        (p,) = alpha
        c = float(np.asarray(center, dtype=float).reshape(-1)[0])
        return ((cell.b - c) ** (p + 1) - (cell.a - c) ** (p + 1)) / (p + 1)
    if isinstance(cell, Triangle):
        return _triangle_monomial_moment(np.asarray(center, dtype=float), alpha, cell.vertices)
    raise TypeError(f"unsupported cell type {type(cell).__name__}")


def _triangle_monomial_moment(center, alpha, vertices) -> float:
    moments = triangle_monomial_moments(center, np.array([alpha], dtype=np.int64), vertices)
    return float(moments[0])


def _affine_coefficients(center, vertices):
    # x(u, v) - cx = a0 + a1 u + a2 v on the reference simplex; same for y
    a0 = vertices[0] - center
    a1 = vertices[1] - vertices[0]
    a2 = vertices[2] - vertices[0]
    return (
        np.array([a0[0], a1[0], a2[0]]),
        np.array([a0[1], a1[1], a2[1]]),
    )


_MOMENT_TABLES: dict[bytes, tuple] = {}


def _exponent_table(exponents: np.ndarray):
    """Concatenated shift-expansion tables for a whole exponent list."""
    key = exponents.tobytes()
    table = _MOMENT_TABLES.get(key)
    if table is None:
        coefs, powers, owners = [], [], []
        for l, (p, q) in enumerate(exponents):
            coef, power = _shift_expansion(int(p), int(q))
            coefs.append(coef)
            powers.append(power)
            owners.append(np.full(len(coef), l))
        table = (
            np.concatenate(coefs),
            np.concatenate(powers),
            np.concatenate(owners),
            len(exponents),
            int(exponents.max()) if len(exponents) else 0,
        )
        _MOMENT_TABLES[key] = table
    return table


def triangle_monomial_moments(center, exponents: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Exact integrals of (x-center)**alpha over a triangle, for many alphas at once."""
    coef, powers, owners, count, max_pow = _exponent_table(np.asarray(exponents, dtype=np.int64))
    a_vec, b_vec = _affine_coefficients(np.asarray(center, dtype=float), vertices)
    grid = np.arange(max_pow + 1)
    apow = a_vec[:, np.newaxis] ** grid
    bpow = b_vec[:, np.newaxis] ** grid
    terms = (
        coef
        * apow[0, powers[:, 0]]
        * apow[1, powers[:, 1]]
        * apow[2, powers[:, 2]]
        * bpow[0, powers[:, 3]]
        * bpow[1, powers[:, 4]]
        * bpow[2, powers[:, 5]]
    )
    jac = 2.0 * abs(_signed_area(vertices))
    return jac * np.bincount(owners, weights=terms, minlength=count)


def monomial_moments(center, basis: MultiIndexBasis, cell) -> np.ndarray:
    """Integrals of every basis monomial over the cell."""
    if isinstance(cell, Triangle):
        return triangle_monomial_moments(center, basis.exponents, cell.vertices)
    return np.array([monomial_moment(center, alpha, cell) for alpha in basis.exponents])
