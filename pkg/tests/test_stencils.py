import numpy as np
import pytest

from conftest import random_operators, random_stencil
from rbfadapt.baselines import oracle_full_solve
from rbfadapt.basis import count_monomials, fd_nullspace_matrix, monomial_basis
from rbfadapt.errors import DegenerateExtension, IllConditioned, SingularSystem
from rbfadapt.kernels import Interval
from rbfadapt.stencils import (
    Derivative,
    Gradient,
    IntegralOver,
    Stencil,
    WeightPair,
    assemble_system,
    error_estimate,
    extend_weights,
    monomial_action,
    solve_weights,
    weight_pair,
)


def jittered_stencil(d, m, mu, rng, n=None):
    return random_stencil(d, m, mu, rng, n=n)


def operators_for(stencil, rng):
    return random_operators(stencil)


def test_assemble_example_matrix():
    st = Stencil(center=[0.5], nodes=[[0.0], [1.0]], m=0, mu=0)
    system = assemble_system(st)
    np.testing.assert_allclose(
        system.matrix, [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
    )


def test_assembled_matrix_symmetric():
    rng = np.random.default_rng(0)
    st = jittered_stencil(2, 2, 2, rng)
    system = assemble_system(st)
    np.testing.assert_allclose(system.matrix, system.matrix.T, atol=1e-14)


def test_duplicate_node_rejected():
    with pytest.raises(ValueError):
        Stencil(center=[0.0], nodes=[[0.0], [0.5], [0.5], [1.0]], m=1, mu=0)


def test_exactly_collinear_2d_nodes_are_singular():
    # all nodes on the x-axis: the y column of the Vandermonde is exactly zero
    nodes = np.column_stack([np.linspace(-1, 1, 6), np.zeros(6)])
    st = Stencil(center=[0.0, 0.0], nodes=nodes, m=1, mu=0)
    with pytest.raises(SingularSystem):
        assemble_system(st)


def test_ill_conditioned_warning():
    h = 1e-9
    st = Stencil(center=[0.0], nodes=[[0.0], [h], [2 * h], [3 * h]], m=1, mu=2)
    with pytest.warns(IllConditioned):
        assemble_system(st)


def test_two_point_derivative_weights():
    h = 0.1
    st = Stencil(center=[0.0], nodes=[[0.0], [h]], m=1, mu=0)
    w = solve_weights(assemble_system(st), Derivative((1,)), st)
    np.testing.assert_allclose(w[:, 0], [-1 / h, 1 / h], rtol=1e-12)


def test_trapezoid_weights():
    h = 0.1
    st = Stencil(center=[h / 2], nodes=[[0.0], [h]], m=1, mu=0)
    w = solve_weights(assemble_system(st), IntegralOver(Interval(0, h)), st)
    np.testing.assert_allclose(w[:, 0], [h / 2, h / 2], rtol=1e-12)


@pytest.mark.parametrize("d,m,mu", [(1, 1, 2), (1, 3, 1), (2, 2, 1), (2, 3, 2)])
def test_polynomial_reproduction_all_operators(d, m, mu):
    rng = np.random.default_rng(100 * d + 10 * m + mu)
    st = jittered_stencil(d, m, mu, rng)
    basis = monomial_basis(d, m)
    system = assemble_system(st)
    for op in operators_for(st, rng):
        w = solve_weights(system, op, st)
        exact = monomial_action(op, st.center, basis.exponents)
        p = basis.vandermonde(st.center, st.nodes)
        applied = p.T @ w
        scale = max(np.abs(exact).max(), np.abs(w).max() * np.abs(p).max())
        assert np.abs(applied - exact).max() <= 1e-11 * max(scale, 1.0)


def test_extension_equals_full_solve_oracle():
    rng = np.random.default_rng(7)
    worst = 0.0
    for trial in range(60):
        d = 1 + trial % 2
        m = int(rng.integers(1, 5))
        mu = int(rng.integers(1, 4))
        st = jittered_stencil(d, m, mu, rng)
        system = assemble_system(st)
        for op in operators_for(st, rng):
            w_m = solve_weights(system, op, st)
            w_ext = extend_weights(system, w_m, op, st)
            w_full = oracle_full_solve(st, op, m + mu)
            dev = np.linalg.norm(w_ext - w_full) / np.linalg.norm(w_full)
            worst = max(worst, dev)
    assert worst <= 1e-10


def test_extension_with_surplus_nodes():
    # structural n > M_(d,m+mu) path: formula must still match the full solve
    rng = np.random.default_rng(21)
    for d in (1, 2):
        m, mu = 2, 2
        n = count_monomials(d, m + mu) + 3
        st = jittered_stencil(d, m, mu, rng, n=n)
        system = assemble_system(st)
        op = operators_for(st, rng)[0]
        w_m = solve_weights(system, op, st)
        w_ext = extend_weights(system, w_m, op, st)
        w_full = oracle_full_solve(st, op, m + mu)
        assert np.linalg.norm(w_ext - w_full) <= 1e-9 * np.linalg.norm(w_full)


def test_extension_four_point_cubic_derivative():
    # with n = M_(1,3) the degree-3 solve is forced onto pure polynomials:
    # the classic one-sided cubic weights, derived independently below
    h = 0.2
    nodes = np.array([[0.0], [h], [2 * h], [3 * h]])
    st = Stencil(center=[0.0], nodes=nodes, m=1, mu=2)
    system = assemble_system(st)
    op = Derivative((1,))
    w_m = solve_weights(system, op, st)
    w_ext = extend_weights(system, w_m, op, st)
    # oracle: differentiate the cubic Lagrange interpolant at 0
    vand = np.vander(nodes[:, 0], 4, increasing=True)
    rhs = np.array([0.0, 1.0, 0.0, 0.0])  # derivative of 1, x, x^2, x^3 at 0
    cubic_weights = np.linalg.solve(vand.T, rhs)
    np.testing.assert_allclose(w_ext[:, 0], cubic_weights, rtol=1e-9)
    np.testing.assert_allclose(
        cubic_weights, [-11 / (6 * h), 3 / h, -3 / (2 * h), 1 / (3 * h)], rtol=1e-12
    )


def test_estimator_weights_structure():
    # The estimator difference annihilates monomials up to degree m (both
    # weight sets reproduce them), while on degrees m+1..m+mu it equals the
    # degree-m rule's error on that monomial: exactly the Taylor-term
    # contributions the estimate is built to detect. Only the extended
    # weights are exact on the full degree-(m+mu) space.
    rng = np.random.default_rng(31)
    for d in (1, 2):
        m, mu = 2, 2
        st = jittered_stencil(d, m, mu, rng)
        op = operators_for(st, rng)[0]
        pair = weight_pair(st, op)
        basis = monomial_basis(d, m + mu)
        m_low = count_monomials(d, m)
        p = basis.vandermonde(st.center, st.nodes)
        exact = monomial_action(op, st.center, basis.exponents)
        resid = p.T @ pair.estimator_weights
        scale = max(np.abs(pair.w_m).max() * np.abs(p).max(), 1.0)
        assert np.abs(resid[:m_low]).max() <= 1e-10 * scale
        # extended weights are exact on the whole degree-(m+mu) space
        applied_high = p.T @ pair.w_mmu
        assert np.abs(applied_high - exact).max() <= 1e-10 * scale
        # so the estimator difference on the new monomials is the degree-m error
        applied_low = p.T @ pair.w_m
        np.testing.assert_allclose(
            resid[m_low:], (applied_low - exact)[m_low:], atol=1e-10 * scale
        )


def test_error_estimate_zero_cases():
    rng = np.random.default_rng(43)
    st = jittered_stencil(1, 2, 2, rng)
    pair = weight_pair(st, Derivative((1,)))
    # polynomial of degree <= m
    vals = 2.0 + 3.0 * st.nodes[:, 0] - 0.5 * st.nodes[:, 0] ** 2
    scale = np.abs(pair.w_m).max() * np.abs(vals).max()
    assert error_estimate(pair, vals) <= 1e-10 * scale
    assert error_estimate(pair, np.zeros(st.n)) == 0.0


def test_error_estimate_quartic_against_two_interpolant_oracle():
    # independent oracle: build both full interpolants of x^4 explicitly and
    # differentiate them at the center
    h = 0.3
    nodes = np.array([[0.0], [h], [2 * h], [3 * h]])
    st = Stencil(center=[0.0], nodes=nodes, m=1, mu=2)
    f_values = nodes[:, 0] ** 4

    def interpolant_derivative(degree):
        n = len(nodes)
        basis = monomial_basis(1, degree)
        phi = np.abs(nodes[:, 0:1] - nodes[:, 0:1].T) ** 3
        p = basis.vandermonde([0.0], nodes)
        size = n + len(basis)
        s = np.zeros((size, size))
        s[:n, :n] = phi
        s[:n, n:] = p
        s[n:, :n] = p.T
        rhs = np.concatenate([f_values, np.zeros(len(basis))])
        sol = np.linalg.solve(s, rhs)
        lam, gamma = sol[:n], sol[n:]
        # d/dx at center: kernel part 3*r^2*sign(x-c) -> at x=0: -3 x_j^2 sign
        kernel_part = sum(
            lam[j] * 3.0 * nodes[j, 0] ** 2 * np.sign(0.0 - nodes[j, 0])
            for j in range(n)
        )
        poly_part = gamma[1] if len(gamma) > 1 else 0.0
        return kernel_part + poly_part

    pair = weight_pair(st, Derivative((1,)))
    estimate = error_estimate(pair, f_values)
    oracle = abs(interpolant_derivative(1) - interpolant_derivative(3))
    assert estimate == pytest.approx(oracle, rel=1e-8)


def test_estimate_order_on_shrinking_stencils():
    # quadrature over one cell of exp(x): both the estimate and the true
    # error must shrink at order >= m + 0.5 under h -> h/2
    for m in (1, 2, 3):
        mu = 2
        n = count_monomials(1, m + mu)
        estimates, errors = [], []
        for h in (0.2, 0.1, 0.05):
            nodes = (np.arange(n) * h).reshape(-1, 1)
            st = Stencil(center=[h / 2], nodes=nodes, m=m, mu=mu)
            cell = Interval(0.0, h)
            pair = weight_pair(st, IntegralOver(cell))
            vals = np.exp(nodes[:, 0])
            estimates.append(error_estimate(pair, vals))
            errors.append(abs(float(vals @ pair.w_m[:, 0]) - (np.exp(h) - 1.0)))
        for seq in (estimates, errors):
            assert seq[0] > seq[1] > seq[2]
        order = np.log2(estimates[0] / estimates[1])
        assert order >= m + 0.5


def test_lambda_columns_lie_in_nullspace_basis_span():
    rng = np.random.default_rng(3)
    for d in (1, 2):
        m, mu = 2, 1
        st = jittered_stencil(d, m, mu, rng)
        system = assemble_system(st)
        basis_high = monomial_basis(d, m + mu)
        m_low = count_monomials(d, m)
        p_tilde = basis_high.vandermonde(st.center, st.nodes)[:, m_low:]
        padded = np.zeros((system.matrix.shape[0], p_tilde.shape[1]))
        padded[: st.n] = p_tilde
        lam = system.solve(padded)[: st.n]
        dmat = fd_nullspace_matrix(st.nodes, st.center, m, mu)
        coeffs, residuals, *_ = np.linalg.lstsq(dmat, lam, rcond=None)
        projected = dmat @ coeffs
        assert np.abs(projected - lam).max() <= 1e-9 * max(np.abs(lam).max(), 1.0)


def test_degenerate_extension_on_conic_nodes():
    # six points on a circle are unisolvent for degree 1 but not degree 2
    angles = np.linspace(0.0, 2 * np.pi, 7)[:-1]
    nodes = 0.5 * np.column_stack([np.cos(angles), np.sin(angles)])
    st = Stencil(center=[0.0, 0.0], nodes=nodes, m=1, mu=1)
    system = assemble_system(st)
    op = Gradient(2)
    w_m = solve_weights(system, op, st)
    with pytest.raises(DegenerateExtension):
        extend_weights(system, w_m, op, st)


def test_extension_condition_threshold():
    rng = np.random.default_rng(5)
    st = jittered_stencil(1, 1, 2, rng)
    system = assemble_system(st)
    op = Derivative((1,))
    w_m = solve_weights(system, op, st)
    with pytest.raises(DegenerateExtension):
        extend_weights(system, w_m, op, st, max_condition=1e-6)


def test_gradient_weights_shape_and_estimate_norm():
    rng = np.random.default_rng(8)
    st = jittered_stencil(2, 2, 2, rng)
    pair = weight_pair(st, Gradient(2))
    assert pair.w_m.shape == (st.n, 2)
    vals = rng.uniform(-1, 1, st.n)
    components = vals @ pair.estimator_weights
    assert error_estimate(pair, vals) == pytest.approx(np.linalg.norm(components))


def test_mu_zero_extension_is_identity():
    rng = np.random.default_rng(9)
    st = jittered_stencil(1, 2, 0, rng, n=5)
    system = assemble_system(st)
    op = Derivative((1,))
    w_m = solve_weights(system, op, st)
    np.testing.assert_array_equal(extend_weights(system, w_m, op, st, mu=0), w_m)
