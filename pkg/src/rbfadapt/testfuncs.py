"""Benchmark integrands: bump sums with tunable sharpness and random shifts.

Two families over [-1, 1]^d, each a sum of 2d shifted terms:

    rational:  sum_i 1 / (1 + a ||x - y_i||^2)
    gaussian:  sum_i exp(-a ||x - y_i||^2)

The two behave very differently under local polynomial expansion (the
rational terms have a finite radius of convergence, the gaussian terms an
infinite one), which is exactly what makes them good stress tests for
adaptive refinement. Derivatives are analytic; definite integrals over the
cube are closed-form wherever elementary (gaussian everywhere via erf,
rational in 1D via arctan) and high-accuracy quadrature otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import Interval

# Shift vectors for the reproducible reference runs (see demos/). Frozen so
# the single-run experiments are repeatable bit for bit across machines.
REFERENCE_SHIFTS_1D = np.array([[0.084435845510910], [0.399782649098896]])
REFERENCE_SHIFTS_2D = np.array(
    [
        [0.322471807186779, 0.784739294760742],
        [0.471357153710612, -0.964237266730882],
        [-0.824125584316469, 0.721758033391102],
        [-0.526514007034680, -0.847278799561768],
    ]
)

# Rational-bump integrals over [-1, 1]^2 for the reference shifts. No
# elementary closed form exists, so these were produced by the nested
# quadrature in `TestFunction.integral` (closed-form inner integral, adaptive
# outer to 1e-13) and cross-checked against independent 2D cubature of the
# square split into two triangles (agreement ~5e-15 relative).
F1_2D_REFERENCE_INTEGRALS = {
    100.0: 0.4356159084539355,
    1000.0: 0.07011123919964826,
}


@dataclass(frozen=True)
class TestFunction:
    """A sharpness parameter ``a`` plus 2d shift points inside (-1, 1)^d."""

    __test__ = False  # not a pytest test class, despite the name

    kind: str  # "f1" (rational) or "f2" (gaussian)
    a: float
    shifts: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("f1", "f2"):
            raise ValueError(f"unknown test function kind {self.kind!r}")
        shifts = np.asarray(self.shifts, dtype=float)
        if shifts.ndim != 2:
            raise ValueError("shifts must be a 2d-by-d array")
        if shifts.shape[0] != 2 * shifts.shape[1]:
            raise ValueError("need exactly 2*d shifts for dimension d")
        if np.any(np.abs(shifts) >= 1.0):
            raise ValueError("shifts must lie strictly inside (-1, 1)^d")
        object.__setattr__(self, "shifts", shifts)

    @property
    def d(self) -> int:
        return self.shifts.shape[1]

    def __call__(self, x) -> np.ndarray | float:
        return self.eval(x)

    def eval(self, x) -> np.ndarray | float:
        """Evaluate at one point (d,) or at rows of points (k, d)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim <= 1
        pts = x.reshape(1, -1) if single else x
        sq = ((pts[:, np.newaxis, :] - self.shifts[np.newaxis, :, :]) ** 2).sum(axis=2)
        if self.kind == "f1":
            vals = (1.0 / (1.0 + self.a * sq)).sum(axis=1)
        else:
            vals = np.exp(-self.a * sq).sum(axis=1)
        return float(vals[0]) if single else vals

    def gradient(self, x) -> np.ndarray:
        """Analytic gradient; rows of points give rows of gradients."""
        x = np.asarray(x, dtype=float)
        single = x.ndim <= 1
        pts = x.reshape(1, -1) if single else x
        diff = pts[:, np.newaxis, :] - self.shifts[np.newaxis, :, :]
        sq = (diff**2).sum(axis=2)
        if self.kind == "f1":
            factors = -2.0 * self.a / (1.0 + self.a * sq) ** 2
        else:
            factors = -2.0 * self.a * np.exp(-self.a * sq)
        grads = (factors[:, :, np.newaxis] * diff).sum(axis=1)
        return grads[0] if single else grads

    def integral(self) -> float:
        """Integral over [-1, 1]^d, exact where elementary."""
        if self.kind == "f2":
            per_term = [
                np.prod([_gauss_line_integral(self.a, y_j, -1.0, 1.0) for y_j in y])
                for y in self.shifts
            ]
            return float(np.sum(per_term))
        if self.d == 1:
            ra = math.sqrt(self.a)
            return float(
                sum(
                    (math.atan(ra * (1.0 - y[0])) + math.atan(ra * (1.0 + y[0]))) / ra
                    for y in self.shifts
                )
            )
        return sum(_rational_square_integral(self.a, y) for y in self.shifts)

    def cell_integral(self, cell, rtol: float = 1e-12) -> float:
        """Integral over one cell; closed form in 1D, oracle cubature in 2D."""
        if isinstance(cell, Interval):
            if self.kind == "f2":
                return float(
                    sum(_gauss_line_integral(self.a, y[0], cell.a, cell.b) for y in self.shifts)
                )
            ra = math.sqrt(self.a)
            return float(
                sum(
                    (math.atan(ra * (cell.b - y[0])) - math.atan(ra * (cell.a - y[0]))) / ra
                    for y in self.shifts
                )
            )
        from .baselines import oracle_integral

        return oracle_integral(self.eval, cell, rtol=rtol)


def _gauss_line_integral(a: float, y: float, lo: float, hi: float) -> float:
    # integral of exp(-a (t - y)^2) over [lo, hi]
    ra = math.sqrt(a)
    return 0.5 * math.sqrt(math.pi / a) * (math.erf(ra * (hi - y)) - math.erf(ra * (lo - y)))


def _rational_square_integral(a: float, y: np.ndarray, rtol: float = 1e-13) -> float:
    """Integral of 1/(1 + a||x - y||^2) over [-1, 1]^2.

    The inner integral in x is elementary; the outer one is done with
    adaptive bisection Simpson refinement to ``rtol``.
    """

    def inner(t: float) -> float:
        c = 1.0 + a * (t - y[1]) ** 2
        s = math.sqrt(a / c)
        return (math.atan(s * (1.0 - y[0])) + math.atan(s * (1.0 + y[0]))) / (s * c)

    from .baselines import adaptive_line_integral

    return adaptive_line_integral(inner, -1.0, 1.0, rtol=rtol)


def make_test_function(kind: str, a: float, d: int, seed: int) -> TestFunction:
    """Seeded construction with shifts drawn uniformly inside (-1, 1)^d."""
    rng = np.random.default_rng(seed)
    while True:
        shifts = rng.uniform(-1.0, 1.0, size=(2 * d, d))
        if np.all(np.abs(shifts) < 1.0 - 1e-12):
            break
    return TestFunction(kind=kind, a=float(a), shifts=shifts, seed=seed)


def reference_function(kind: str, a: float, d: int) -> TestFunction:
    """The frozen reference-shift configuration for dimension d."""
    shifts = REFERENCE_SHIFTS_1D if d == 1 else REFERENCE_SHIFTS_2D
    return TestFunction(kind=kind, a=float(a), shifts=shifts)
