"""Local stencil systems: operator weights and the two-degree error estimate.

For a stencil (a center plus its n nearest nodes) the augmented kernel
interpolant leads to the symmetric saddle system

    [ Phi  P ] [w]   [L phi]
    [ P^T  0 ] [v] = [L pi ]

whose first block of unknowns is the weight vector applying the operator L to
the local interpolant. Extending the polynomial part from degree m to m+mu
reuses the factorization of the degree-m system: the degree-m matrix is the
upper-left block of the degree-(m+mu) one, and block elimination yields the
update implemented in `extend_weights`. The difference of the two weight
vectors applied to function values is the local error estimate.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import kernels
from .basis import count_monomials, monomial_basis, multi_index_factorial
from .errors import DegenerateExtension, IllConditioned, SingularSystem
from .kernels import Interval, Triangle
from .linalg import PivotedLU

COND_WARN_THRESHOLD = 1e14


@dataclass(frozen=True)
class Derivative:
    """Apply a first partial derivative (multi-index alpha) at the center."""

    alpha: tuple[int, ...]

    @property
    def n_components(self) -> int:
        return 1


@dataclass(frozen=True)
class Gradient:
    """Apply the full gradient at the center; one component per dimension."""

    dim: int

    @property
    def n_components(self) -> int:
        return self.dim


@dataclass(frozen=True)
class IntegralOver:
    """Integrate over a cell (an Interval or a Triangle)."""

    cell: Union[Interval, Triangle]

    @property
    def n_components(self) -> int:
        return 1


OperatorSpec = Union[Derivative, Gradient, IntegralOver]


def _check_operator(op: OperatorSpec, d: int) -> None:
    if isinstance(op, Derivative):
        if len(op.alpha) != d:
            raise ValueError(f"derivative multi-index has length {len(op.alpha)}, expected {d}")
    elif isinstance(op, Gradient):
        if op.dim != d:
            raise ValueError(f"gradient dimension {op.dim} != stencil dimension {d}")
    elif isinstance(op, IntegralOver):
        if op.cell.dim != d:
            raise ValueError(f"cell dimension {op.cell.dim} != stencil dimension {d}")
    else:
        raise TypeError(f"unknown operator spec {type(op).__name__}")


@dataclass(frozen=True)
class Stencil:
    """A center point, its neighborhood, and the degrees of the local model."""

    center: np.ndarray
    nodes: np.ndarray
    m: int
    mu: int = 2

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes.reshape(-1, 1)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "nodes", nodes)
        if nodes.shape[1] != center.shape[0]:
            raise ValueError("node and center dimensions disagree")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        needed = count_monomials(self.d, self.m + self.mu)
        if self.n < needed:
            raise ValueError(
                f"need at least M_(d,m+mu) = {needed} nodes for d={self.d}, "
                f"m={self.m}, mu={self.mu}; got {self.n}"
            )
        diam = float(np.linalg.norm(nodes.max(axis=0) - nodes.min(axis=0)))
        diffs = nodes[:, np.newaxis, :] - nodes[np.newaxis, :, :]
        dist = np.linalg.norm(diffs, axis=2)
        np.fill_diagonal(dist, np.inf)
        if dist.min() <= 1e-14 * max(diam, np.finfo(float).tiny):
            raise ValueError("stencil nodes are not pairwise distinct")

    @property
    def d(self) -> int:
        return self.center.shape[0]

    @property
    def n(self) -> int:
        return self.nodes.shape[0]


class SaddleSystem:
    """Factorized saddle matrix for one stencil at polynomial degree m."""

    def __init__(self, stencil: Stencil, matrix: np.ndarray, lu: PivotedLU):
        self.stencil = stencil
        self.matrix = matrix
        self._lu = lu
        self.cond_estimate = lu.cond_estimate

    @property
    def n(self) -> int:
        return self.stencil.n

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self._lu.solve(rhs)


def assemble_system(stencil: Stencil) -> SaddleSystem:
    """Build and factorize the degree-m saddle matrix for a stencil.

    Raises SingularSystem when the factorization hits an exactly zero pivot
    (duplicate or otherwise non-unisolvent nodes); warns IllConditioned when
    the pivot-based condition estimate exceeds 1e14.
    """
    nodes = stencil.nodes
    n = stencil.n
    basis = monomial_basis(stencil.d, stencil.m)
    diffs = nodes[:, np.newaxis, :] - nodes[np.newaxis, :, :]
    phi = np.linalg.norm(diffs, axis=2) ** 3
    p = basis.vandermonde(stencil.center, nodes)
    size = n + len(basis)
    matrix = np.zeros((size, size))
    matrix[:n, :n] = phi
    matrix[:n, n:] = p
    matrix[n:, :n] = p.T
    lu = PivotedLU(matrix)
    if lu.singular:
        raise SingularSystem(
            f"saddle system is singular for stencil at {stencil.center.tolist()} "
            f"(n={n}, m={stencil.m}); nodes are likely not unisolvent"
        )
    if lu.cond_estimate > COND_WARN_THRESHOLD:
        warnings.warn(
            f"stencil at {stencil.center.tolist()}: condition estimate "
            f"{lu.cond_estimate:.2e} exceeds {COND_WARN_THRESHOLD:.0e}",
            IllConditioned,
            stacklevel=2,
        )
    return SaddleSystem(stencil, matrix, lu)


def monomial_action(op: OperatorSpec, center, exponents) -> np.ndarray:
    """Exact action of the operator on shifted monomials, one column per component.

    Derivatives are evaluated at the center, where every monomial except the
    matching one vanishes; integrals use the exact cell moments.
    """
    exponents = np.asarray(exponents)
    if isinstance(op, IntegralOver):
        if isinstance(op.cell, Triangle):
            moments = kernels.triangle_monomial_moments(center, exponents, op.cell.vertices)
        else:
            moments = np.array(
                [kernels.monomial_moment(center, alpha, op.cell) for alpha in exponents]
            )
        return moments.reshape(-1, 1)
    if isinstance(op, Derivative):
        alphas = [tuple(op.alpha)]
    else:
        alphas = [tuple(np.eye(op.dim, dtype=int)[j]) for j in range(op.dim)]
    out = np.zeros((len(exponents), len(alphas)))
    for c, alpha in enumerate(alphas):
        for l, expo in enumerate(exponents):
            if tuple(expo) == alpha:
                out[l, c] = multi_index_factorial(alpha)
    return out


def kernel_action(op: OperatorSpec, stencil: Stencil) -> np.ndarray:
    """Action of the operator on the kernel shifts, one column per component."""
    if isinstance(op, IntegralOver):
        return kernels.kernel_moments(stencil.nodes, op.cell).reshape(-1, 1)
    grads = kernels.kernel_gradients(stencil.nodes, stencil.center)
    if isinstance(op, Gradient):
        return grads
    j = int(np.argmax(np.asarray(op.alpha)))
    return grads[:, j : j + 1]


def operator_rhs(op: OperatorSpec, stencil: Stencil, degree: int) -> np.ndarray:
    basis = monomial_basis(stencil.d, degree)
    return np.vstack(
        [
            kernel_action(op, stencil),
            monomial_action(op, stencil.center, basis.exponents),
        ]
    )


def solve_weights(system: SaddleSystem, op: OperatorSpec, stencil: Stencil) -> np.ndarray:
    """Degree-m operator weights, shape (n, n_components).

    The polynomial block of the solution is a by-product and is discarded.
    """
    _check_operator(op, stencil.d)
    rhs = operator_rhs(op, stencil, stencil.m)
    solution = system.solve(rhs)
    return solution[: stencil.n]


def extend_weights(
    system: SaddleSystem,
    w_m: np.ndarray,
    op: OperatorSpec,
    stencil: Stencil,
    mu: int | None = None,
    max_condition: float | None = None,
) -> np.ndarray:
    """Degree-(m+mu) weights from the degree-m solve by block elimination.

    The degree-m saddle matrix is the upper-left block of the degree-(m+mu)
    one, so the higher-degree solve reduces to back-substitutions against the
    existing factorization plus a small dense solve of size
    M_(d,m+mu) - M_(d,m). Agrees with assembling and solving the full
    degree-(m+mu) system directly.

    ``max_condition``, when given, makes a reduced system whose condition
    estimate exceeds it count as degenerate. Lattice-aligned neighborhoods
    (every interior stencil of a uniformly spaced patch) are rank deficient
    at degree m+mu up to roundoff, and the threshold catches those whose
    deficiency does not cancel to an exact zero pivot.
    """
    _check_operator(op, stencil.d)
    if mu is None:
        mu = stencil.mu
    if mu == 0:
        return np.array(w_m, copy=True)
    d, n, m = stencil.d, stencil.n, stencil.m
    basis_high = monomial_basis(d, m + mu)
    m_low = count_monomials(d, m)
    m_high = len(basis_high)
    if n < m_high:
        raise ValueError(f"extension needs n >= {m_high} nodes, got {n}")
    w_m = np.asarray(w_m).reshape(n, -1)

    p_tilde = basis_high.vandermonde(stencil.center, stencil.nodes)[:, m_low:]
    padded = np.zeros((system.matrix.shape[0], m_high - m_low))
    padded[:n] = p_tilde
    lam = system.solve(padded)[:n]  # kernel-block coefficients of the new monomials

    reduced = p_tilde.T @ lam
    lpi_tilde = monomial_action(op, stencil.center, basis_high.exponents[m_low:])
    residual = p_tilde.T @ w_m - lpi_tilde
    try:
        lu = PivotedLU(reduced)
        if lu.singular or (max_condition is not None and lu.cond_estimate > max_condition):
            raise np.linalg.LinAlgError
        correction = lu.solve(residual)
    except np.linalg.LinAlgError:
        raise DegenerateExtension(
            f"degree extension to m+mu={m + mu} is singular for stencil at "
            f"{stencil.center.tolist()}; nodes are not unisolvent at that degree"
        ) from None
    return w_m - lam @ correction


@dataclass
class WeightPair:
    """Weights at both degrees plus their difference (the estimator weights)."""

    w_m: np.ndarray
    w_mmu: np.ndarray
    estimator_weights: np.ndarray = field(init=False)

    def __post_init__(self):
        self.estimator_weights = self.w_m - self.w_mmu


def weight_pair(stencil: Stencil, op: OperatorSpec) -> WeightPair:
    """Assemble, solve and extend in one call."""
    system = assemble_system(stencil)
    w_m = solve_weights(system, op, stencil)
    w_mmu = extend_weights(system, w_m, op, stencil)
    return WeightPair(w_m=w_m, w_mmu=w_mmu)


def error_estimate(pair: WeightPair, f_values: np.ndarray) -> float:
    """|L s_m[f] - L s_(m+mu)[f]|, with the Euclidean norm across components."""
    f_values = np.asarray(f_values, dtype=float)
    per_component = f_values @ pair.estimator_weights
    return float(np.linalg.norm(np.atleast_1d(per_component)))
