"""Multi-index algebra and shifted-monomial bases.

A basis is the graded list of all d-variate monomial exponents up to a total
degree: all exponents of total degree g come before degree g+1, and within a
degree the ordering is lexicographic with the larger first coordinate first.
This makes the length-``count_monomials(d, m')`` prefix of any basis exactly
the degree-``m'`` basis, which the degree-extension step in
:mod:`rbfadapt.stencils` relies on.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .errors import SingularVandermonde
from .linalg import PivotedLU

# alpha! in float is exact up to degree 12 (12! < 2**53); larger degrees are
# rejected rather than silently rounded.
MAX_DEGREE = 12


def count_monomials(d: int, m: int) -> int:
    """Number of d-variate monomials of total degree at most m."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if m < 0:
        raise ValueError(f"degree must be >= 0, got {m}")
    count = math.comb(m + d, d)
    if count > 2**53:
        raise OverflowError(f"basis size for d={d}, m={m} is not representable")
    return count


def multi_index_degree(alpha) -> int:
    return int(sum(alpha))


def multi_index_factorial(alpha) -> float:
    """alpha! = prod_j alpha_j!, guarded against float overflow."""
    if multi_index_degree(alpha) > MAX_DEGREE:
        raise ValueError(f"multi-index degree {multi_index_degree(alpha)} exceeds {MAX_DEGREE}")
    out = 1
    for a in alpha:
        if a < 0:
            raise ValueError("multi-index entries must be non-negative")
        out *= math.factorial(int(a))
    return float(out)


@lru_cache(maxsize=None)
def _graded_lex_exponents(d: int, m: int) -> np.ndarray:
    rows = []
    for degree in range(m + 1):
        # descending ranges make itertools.product yield descending-lex tuples
        for combo in itertools.product(range(degree, -1, -1), repeat=d):
            if sum(combo) == degree:
                rows.append(combo)
    exponents = np.array(rows, dtype=np.int64).reshape(len(rows), d)
    exponents.setflags(write=False)
    return exponents


class MultiIndexBasis:
    """Graded-lex ordered monomial exponents for ``dim`` variables up to ``max_degree``."""

    def __init__(self, dim: int, max_degree: int):
        if dim not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {dim}")
        if max_degree > MAX_DEGREE:
            raise ValueError(f"degree {max_degree} exceeds the supported maximum {MAX_DEGREE}")
        self.dim = dim
        self.max_degree = max_degree
        self.exponents = _graded_lex_exponents(dim, max_degree)
        assert len(self.exponents) == count_monomials(dim, max_degree)
        self.degrees = self.exponents.sum(axis=1)
        self.factorials = np.array(
            [multi_index_factorial(alpha) for alpha in self.exponents]
        )

    def __len__(self) -> int:
        return len(self.exponents)

    def __repr__(self) -> str:
        return f"MultiIndexBasis(dim={self.dim}, max_degree={self.max_degree})"

    def truncated(self, degree: int) -> "MultiIndexBasis":
        """The degree-``degree`` basis; a prefix of this one."""
        if degree > self.max_degree:
            raise ValueError("cannot truncate to a higher degree")
        return MultiIndexBasis(self.dim, degree)

    def eval(self, center, x) -> np.ndarray:
        """Evaluate every monomial (x - center)**alpha at a single point."""
        shifted = np.atleast_1d(np.asarray(x, dtype=float) - np.asarray(center, dtype=float))
        return np.prod(shifted[np.newaxis, :] ** self.exponents, axis=1)

    def vandermonde(self, center, nodes) -> np.ndarray:
        """Matrix with entry (i, l) = (nodes[i] - center)**alpha_l."""
        nodes = np.asarray(nodes, dtype=float).reshape(-1, self.dim)
        shifted = nodes - np.asarray(center, dtype=float).reshape(1, self.dim)
        grid = np.arange(self.max_degree + 1)
        out = None
        for j in range(self.dim):
            cols = (shifted[:, j : j + 1] ** grid)[:, self.exponents[:, j]]
            out = cols if out is None else out * cols
        return out


@lru_cache(maxsize=None)
def monomial_basis(d: int, m: int) -> MultiIndexBasis:
    """Memoized basis factory; bases are immutable so sharing is safe."""
    return MultiIndexBasis(d, m)


def prefix_exponents(d: int, n: int) -> np.ndarray:
    """The first ``n`` graded-lex exponents in ``d`` variables."""
    degree = 0
    while count_monomials(d, degree) < n:
        degree += 1
    return _graded_lex_exponents(d, degree)[:n]


def _polynomial_system(nodes: np.ndarray, center, exponents: np.ndarray) -> PivotedLU:
    """Factorize the n x n matrix with rows pi_l evaluated at the nodes."""
    d = exponents.shape[1]
    nodes = np.asarray(nodes, dtype=float).reshape(-1, d)
    shifted = nodes - np.asarray(center, dtype=float).reshape(1, d)
    matrix = np.prod(shifted[np.newaxis, :, :] ** exponents[:, np.newaxis, :], axis=2)
    lu = PivotedLU(matrix)
    if lu.singular:
        raise SingularVandermonde(
            f"nodes are not unisolvent for the first {len(exponents)} monomials"
        )
    return lu


def fd_nullspace_vector(nodes, center, basis: MultiIndexBasis, l: int) -> np.ndarray:
    """Weights approximating the alpha_l mixed derivative at ``center``.

    Solves the square polynomial system whose row r is monomial r evaluated
    at the nodes, with right-hand side alpha_l! in position l. Applied to
    function values on the nodes, the result equals the alpha_l derivative of
    the unique polynomial interpolant on the first ``n`` monomials.
    """
    exponents = basis.exponents
    n = len(nodes)
    if len(exponents) != n:
        raise ValueError(f"basis size {len(exponents)} must equal node count {n}")
    if not 0 <= l < n:
        raise ValueError(f"monomial index {l} out of range")
    lu = _polynomial_system(nodes, center, exponents)
    rhs = np.zeros(n)
    rhs[l] = multi_index_factorial(exponents[l])
    return lu.solve(rhs)


def fd_nullspace_matrix(nodes, center, m: int, mu: int) -> np.ndarray:
    """Columns l = M_{d,m}+1 .. n of the derivative-weight vectors.

    Every column annihilates the degree-m Vandermonde transpose, so together
    they span the null space of that constraint block.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim == 1:
        nodes = nodes.reshape(-1, 1)
    d = nodes.shape[1]
    n = len(nodes)
    if n != count_monomials(d, m + mu):
        raise ValueError(f"expected n = M_(d,m+mu) = {count_monomials(d, m + mu)}, got {n}")
    exponents = prefix_exponents(d, n)
    lu = _polynomial_system(nodes, center, exponents)
    m_low = count_monomials(d, m)
    rhs = np.zeros((n, n - m_low))
    for j, l in enumerate(range(m_low, n)):
        rhs[l, j] = multi_index_factorial(exponents[l])
    return lu.solve(rhs)
