"""Shared fixtures: desk-scale random stencils for equivalence testing.

The two-route comparisons (block-elimination extension vs direct full solve)
measure algebraic identity, so the fixture keeps the saddle systems well
conditioned (~1e4..1e6): jittered grid geometry wide enough to span more
lattice lines than the polynomial degree, with badly conditioned draws
rejected and redrawn.
"""
import numpy as np

from rbfadapt.basis import count_monomials, monomial_basis
from rbfadapt.kernels import Interval, Triangle
from rbfadapt.stencils import Derivative, Gradient, IntegralOver, Stencil

COND_CAP = 3e6


def _full_system_cond(stencil: Stencil) -> float:
    n = stencil.n
    basis = monomial_basis(stencil.d, stencil.m + stencil.mu)
    phi = np.linalg.norm(
        stencil.nodes[:, None, :] - stencil.nodes[None, :, :], axis=2
    ) ** 3
    p = basis.vandermonde(stencil.center, stencil.nodes)
    s = np.zeros((n + len(basis),) * 2)
    s[:n, :n] = phi
    s[:n, n:] = p
    s[n:, :n] = p.T
    return float(np.linalg.cond(s))


def random_stencil(d, m, mu, rng, n=None, tries=60):
    """A random unisolvent stencil whose full saddle system is well conditioned."""
    if n is None:
        n = count_monomials(d, m + mu)
    stencil = None
    for _ in range(tries):
        center = rng.uniform(-1, 1, d)
        if d == 1:
            base = (np.arange(n) - (n - 1) / 2).reshape(-1, 1)
            nodes = center + (2.0 / n) * (base + 0.3 * rng.uniform(-1, 1, (n, 1)))
        else:
            side = int(np.ceil(np.sqrt(n))) + 2
            grid = np.array(
                [(i, j) for i in range(side) for j in range(side)], dtype=float
            )
            grid -= grid.mean(axis=0)
            subset = grid[rng.permutation(len(grid))[:n]]
            nodes = center + (2.0 / side) * (subset + 0.3 * rng.uniform(-1, 1, (n, 2)))
        stencil = Stencil(center=center, nodes=nodes, m=m, mu=mu)
        if _full_system_cond(stencil) < COND_CAP:
            return stencil
    return stencil


def random_operators(stencil, offset=0.1):
    """One operator of each applicable kind, anchored near the stencil center."""
    if stencil.d == 1:
        lo = float(stencil.center[0] - offset)
        return [Derivative((1,)), IntegralOver(Interval(lo, lo + 2 * offset))]
    c = stencil.center
    tri = Triangle([c + (-0.08, -0.05), c + (0.09, -0.02), c + (0.01, 0.08)])
    return [Gradient(2), IntegralOver(tri)]
