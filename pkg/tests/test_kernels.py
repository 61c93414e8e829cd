import numpy as np
import pytest

from rbfadapt.baselines import oracle_integral
from rbfadapt.basis import monomial_basis
from rbfadapt.errors import NonConvergedMoment, UnsupportedOrder
from rbfadapt.kernels import (
    Interval,
    Triangle,
    kernel_derivative,
    kernel_eval,
    kernel_gradients,
    kernel_moment,
    kernel_moment_quadrature,
    kernel_moments,
    monomial_moment,
    monomial_moments,
    triangle_monomial_moments,
)

# integral of r^3 over the unit right triangle with corner singularity,
# frozen from the subdivision/Richardson oracle (cross-checked against the
# symmetric-rule cubature at 1.8e-15 relative)
KERNEL_MOMENT_UNIT_TRIANGLE = 0.11087094650525842

UNIT_RIGHT = Triangle([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


def test_kernel_eval_examples():
    assert kernel_eval([0.0], 2.0) == pytest.approx(8.0)
    assert kernel_eval([0.3, -0.2], [0.3, -0.2]) == 0.0
    assert kernel_eval([0.0, 0.0], [3.0, 4.0]) == pytest.approx(125.0)


def test_kernel_eval_batch():
    out = kernel_eval([0.0, 0.0], np.array([[3.0, 4.0], [0.0, 0.0], [1.0, 0.0]]))
    np.testing.assert_allclose(out, [125.0, 0.0, 1.0])


def test_kernel_derivative_examples():
    assert kernel_derivative([1.0], [2.0], (1,)) == pytest.approx(3.0)
    assert kernel_derivative([0.5, 0.5], [0.5, 0.5], (1, 0)) == 0.0
    assert kernel_derivative([0.0, 0.0], [3.0, 4.0], (1, 0)) == pytest.approx(45.0)


def test_kernel_derivative_rejects_higher_order():
    with pytest.raises(UnsupportedOrder):
        kernel_derivative([0.0], [1.0], (2,))
    with pytest.raises(UnsupportedOrder):
        kernel_derivative([0.0, 0.0], [1.0, 1.0], (1, 1))


def test_kernel_derivative_matches_finite_differences():
    rng = np.random.default_rng(3)
    step = 1e-6
    for _ in range(40):
        c = rng.uniform(-1, 1, 2)
        x = rng.uniform(-1, 1, 2)
        if np.linalg.norm(x - c) < 0.1:
            continue
        for j, alpha in enumerate([(1, 0), (0, 1)]):
            e = np.zeros(2)
            e[j] = step
            fd = (kernel_eval(c, x + e) - kernel_eval(c, x - e)) / (2 * step)
            exact = kernel_derivative(c, x, alpha)
            assert abs(fd - exact) <= 1e-7 * max(abs(exact), 1.0)


def test_kernel_gradients_batch():
    centers = np.array([[0.0, 0.0], [1.0, 1.0]])
    grads = kernel_gradients(centers, [3.0, 4.0])
    np.testing.assert_allclose(grads[0], [45.0, 60.0])
    r = np.hypot(2.0, 3.0)
    np.testing.assert_allclose(grads[1], [3 * r * 2.0, 3 * r * 3.0])


def test_interval_moments_examples():
    assert kernel_moment([0.0], Interval(0, 1)) == pytest.approx(0.25)
    assert kernel_moment([0.0], Interval(-1, 1)) == pytest.approx(0.5)
    # interior center splits at the kink
    assert kernel_moment([0.25], Interval(0, 1)) == pytest.approx(
        0.25**4 / 4 + 0.75**4 / 4
    )


def test_triangle_kernel_moment_frozen_oracle_value():
    assert kernel_moment([0.0, 0.0], UNIT_RIGHT) == pytest.approx(
        KERNEL_MOMENT_UNIT_TRIANGLE, rel=1e-12
    )


def test_kernel_moment_matches_subdivision_oracle():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 50:
        verts = rng.uniform(-1, 1, (3, 2))
        try:
            tri = Triangle(verts)
        except ValueError:
            continue
        center = rng.uniform(-1, 1, 2)
        closed = kernel_moment(center, tri)
        brute = oracle_integral(
            lambda p: np.linalg.norm(p - center, axis=1) ** 3, tri, rtol=1e-12
        )
        assert closed == pytest.approx(brute, rel=1e-10)
        checked += 1


def test_kernel_moment_quadrature_agrees_with_closed_form():
    for c in [(0.0, 0.0), (0.3, 0.3), (2.0, -1.0), (0.5, 0.0)]:
        closed = kernel_moment(np.array(c), UNIT_RIGHT)
        quad = kernel_moment_quadrature(np.array(c), UNIT_RIGHT)
        assert quad == pytest.approx(closed, rel=1e-12)


def test_kernel_moment_quadrature_nonconvergence():
    with pytest.raises(NonConvergedMoment):
        kernel_moment_quadrature([0.1, 0.1], UNIT_RIGHT, rtol=1e-30, max_levels=3)


def test_moment_additivity_under_subdivision():
    rng = np.random.default_rng(5)
    tri = Triangle([(-0.5, -0.2), (0.8, 0.1), (0.1, 0.9)])
    children = tri.split()
    for _ in range(10):
        c = rng.uniform(-1, 1, 2)
        whole = kernel_moment(c, tri)
        parts = sum(kernel_moment(c, t) for t in children)
        assert parts == pytest.approx(whole, rel=1e-11)
    alpha = (2, 1)
    whole = monomial_moment([0.1, 0.0], alpha, tri)
    parts = sum(monomial_moment([0.1, 0.0], alpha, t) for t in children)
    assert parts == pytest.approx(whole, rel=1e-11)


def test_interval_additivity():
    cell = Interval(-0.3, 0.9)
    left, right = cell.split()
    for c in (-1.0, 0.0, 0.5):
        assert kernel_moment([c], left) + kernel_moment([c], right) == pytest.approx(
            kernel_moment([c], cell), rel=1e-12
        )


def test_monomial_moment_examples():
    assert monomial_moment([0.0], (1,), Interval(0, 1)) == pytest.approx(0.5)
    assert monomial_moment([0.0, 0.0], (0, 0), UNIT_RIGHT) == pytest.approx(0.5)
    assert monomial_moment([0.0, 0.0], (1, 0), UNIT_RIGHT) == pytest.approx(1.0 / 6.0)


def test_monomial_moment_against_oracle():
    rng = np.random.default_rng(17)
    tri = Triangle([(-0.4, -0.9), (0.9, -0.2), (-0.1, 0.7)])
    center = np.array([0.2, -0.1])
    for alpha in [(0, 0), (1, 0), (0, 1), (2, 1), (3, 2), (0, 4)]:
        exact = monomial_moment(center, alpha, tri)
        brute = oracle_integral(
            lambda p: (p[:, 0] - center[0]) ** alpha[0] * (p[:, 1] - center[1]) ** alpha[1],
            tri,
            rtol=1e-12,
        )
        assert exact == pytest.approx(brute, rel=1e-10, abs=1e-14)


def test_monomial_moments_batch_matches_single():
    basis = monomial_basis(2, 5)
    tri = Triangle([(0.2, 0.1), (0.6, 0.15), (0.35, 0.5)])
    center = np.array([0.3, 0.2])
    batch = monomial_moments(center, basis, tri)
    single = np.array([monomial_moment(center, a, tri) for a in basis.exponents])
    np.testing.assert_array_equal(batch, single)
    batch2 = triangle_monomial_moments(center, basis.exponents, tri.vertices)
    np.testing.assert_array_equal(batch, batch2)


def test_batched_kernel_moments():
    centers = np.array([[0.0, 0.0], [0.3, 0.3], [2.0, -1.0]])
    batch = kernel_moments(centers, UNIT_RIGHT)
    singles = [kernel_moment(c, UNIT_RIGHT) for c in centers]
    np.testing.assert_allclose(batch, singles, rtol=1e-14)


def test_cell_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Triangle([(0, 0), (1, 0), (2, 0)])
    # clockwise input is reoriented, not rejected
    tri = Triangle([(0, 0), (0, 1), (1, 0)])
    assert tri.measure == pytest.approx(0.5)
    e1 = tri.vertices[1] - tri.vertices[0]
    e2 = tri.vertices[2] - tri.vertices[0]
    assert e1[0] * e2[1] - e1[1] * e2[0] > 0
