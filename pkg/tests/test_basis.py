import numpy as np
import pytest

from rbfadapt.basis import (
    MultiIndexBasis,
    count_monomials,
    fd_nullspace_matrix,
    fd_nullspace_vector,
    monomial_basis,
    multi_index_factorial,
    prefix_exponents,
)
from rbfadapt.errors import SingularVandermonde


def test_count_monomials_examples():
    assert count_monomials(1, 1) == 2
    assert count_monomials(2, 6) == 28
    assert count_monomials(2, 4) == 15


def test_count_monomials_validation():
    with pytest.raises(ValueError):
        count_monomials(0, 3)
    with pytest.raises(ValueError):
        count_monomials(2, -1)
    with pytest.raises(OverflowError):
        count_monomials(40, 60)


def test_enumeration_examples():
    b = monomial_basis(1, 2)
    assert b.exponents.tolist() == [[0], [1], [2]]
    b = monomial_basis(2, 1)
    assert b.exponents.tolist() == [[0, 0], [1, 0], [0, 1]]
    assert len(monomial_basis(2, 2)) == 6


def test_graded_lex_order_within_degree():
    b = monomial_basis(2, 2)
    assert b.exponents.tolist() == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("m", [0, 1, 3, 6])
def test_prefix_property(d, m):
    big = monomial_basis(d, m)
    for lower in range(m + 1):
        small = monomial_basis(d, lower)
        np.testing.assert_array_equal(big.exponents[: len(small)], small.exponents)


def test_basis_size_matches_formula():
    for d in (1, 2, 3):
        for m in (0, 2, 5):
            assert len(monomial_basis(d, m)) == count_monomials(d, m)


def test_eval_monomials_examples():
    b = monomial_basis(1, 2)
    np.testing.assert_allclose(b.eval([0.0], [2.0]), [1.0, 2.0, 4.0])
    b2 = monomial_basis(2, 3)
    at_center = b2.eval([0.3, -0.4], [0.3, -0.4])
    expected = np.zeros(len(b2))
    expected[0] = 1.0
    np.testing.assert_allclose(at_center, expected)
    b3 = monomial_basis(2, 1)
    np.testing.assert_allclose(b3.eval([0.0, 0.0], [3.0, -1.0]), [1.0, 3.0, -1.0])


def test_vandermonde_structure():
    b = monomial_basis(2, 2)
    nodes = np.array([[0.1, 0.2], [0.4, -0.3], [-0.2, 0.5]])
    center = np.array([0.05, 0.1])
    p = b.vandermonde(center, nodes)
    assert p.shape == (3, 6)
    np.testing.assert_allclose(p[:, 0], 1.0)
    for i, x in enumerate(nodes):
        np.testing.assert_allclose(p[i], b.eval(center, x))


def test_factorial_guard():
    assert multi_index_factorial((3, 2)) == 12.0
    with pytest.raises(ValueError):
        multi_index_factorial((13,))
    with pytest.raises(ValueError):
        multi_index_factorial((7, 7))


def test_degree_cap():
    with pytest.raises(ValueError):
        MultiIndexBasis(1, 13)


def test_prefix_exponents_partial_degree():
    exps = prefix_exponents(2, 4)
    assert exps.tolist() == [[0, 0], [1, 0], [0, 1], [2, 0]]


# classic finite-difference vectors on {-h, 0, h}: derived by solving the
# 3x3 transposed Vandermonde system by hand
@pytest.mark.parametrize("h", [1.0, 0.1, 0.003])
def test_fd_vector_second_difference(h):
    nodes = np.array([[-h], [0.0], [h]])
    basis = monomial_basis(1, 2)
    d2 = fd_nullspace_vector(nodes, [0.0], basis, 2)
    np.testing.assert_allclose(d2, [1 / h**2, -2 / h**2, 1 / h**2], rtol=1e-10)
    d0 = fd_nullspace_vector(nodes, [0.0], basis, 0)
    np.testing.assert_allclose(d0, [0.0, 1.0, 0.0], atol=1e-12)
    d1 = fd_nullspace_vector(nodes, [0.0], basis, 1)
    np.testing.assert_allclose(d1, [-1 / (2 * h), 0.0, 1 / (2 * h)], atol=1e-12 / h)


def test_fd_vector_reproduces_polynomial_derivatives():
    # applying the weights to monomial values must give exact derivatives
    rng = np.random.default_rng(42)
    nodes = np.sort(rng.uniform(-1, 1, 5)).reshape(-1, 1)
    center = np.array([0.1])
    basis = monomial_basis(1, 4)
    for l, alpha in enumerate(basis.exponents):
        d = fd_nullspace_vector(nodes, center, basis, l)
        for k, beta in enumerate(basis.exponents):
            vals = (nodes[:, 0] - center[0]) ** beta[0]
            b, a = int(beta[0]), int(alpha[0])
            if b >= a:
                expected = np.prod(np.arange(b, b - a, -1.0)) * (0.0 if b > a else 1.0)
            else:
                expected = 0.0
            assert abs(float(d @ vals) - expected) < 1e-9


def test_fd_vector_singular_detection():
    nodes = np.array([[0.0], [1.0], [1.0]])  # duplicate
    basis = monomial_basis(1, 2)
    with pytest.raises(SingularVandermonde):
        fd_nullspace_vector(nodes, [0.0], basis, 1)


@pytest.mark.parametrize("d,m,mu", [(1, 1, 1), (1, 2, 2), (2, 1, 1), (2, 2, 2)])
def test_fd_matrix_annihilates_low_degree(d, m, mu):
    rng = np.random.default_rng(d * 10 + m)
    n = count_monomials(d, m + mu)
    center = np.zeros(d)
    nodes = rng.uniform(-1, 1, size=(n, d))
    mat = fd_nullspace_matrix(nodes, center, m, mu)
    assert mat.shape == (n, n - count_monomials(d, m))
    p_low = monomial_basis(d, m).vandermonde(center, nodes)
    residual = p_low.T @ mat
    scale = np.abs(mat).max() * np.abs(p_low).max()
    assert np.abs(residual).max() <= 1e-12 * scale
    assert np.linalg.matrix_rank(mat) == n - count_monomials(d, m)


def test_fd_matrix_1d_example():
    h = 0.25
    nodes = np.array([[-h], [0.0], [h]])
    mat = fd_nullspace_matrix(nodes, [0.0], 1, 1)
    assert mat.shape == (3, 1)
    np.testing.assert_allclose(mat[:, 0], [1 / h**2, -2 / h**2, 1 / h**2], rtol=1e-10)
