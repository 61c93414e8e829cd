"""Thin wrapper around row-pivoted dense LU with a cheap condition estimate.

All stencil systems in this package are small (at most a few hundred rows),
so a single dense factorization per system is the right tool; the pivot
diagonal doubles as a condition estimate that is cheap and adequate for
flagging degeneracy.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg


class PivotedLU:
    """Factorization of a square matrix, reusable for many right-hand sides.

    ``singular`` is True only for exact rank deficiency (a zero or non-finite
    pivot); merely ill-conditioned systems factorize and report a large
    ``cond_estimate`` instead, so callers can warn without refusing to solve.
    """

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("expected a square matrix")
        self.shape = matrix.shape
        self._lu, self._piv = scipy.linalg.lu_factor(matrix, check_finite=False)
        diag = np.abs(np.diagonal(self._lu))
        if not np.all(np.isfinite(diag)) or np.any(diag == 0.0):
            self.singular = True
            self.cond_estimate = np.inf
        else:
            self.singular = False
            self.cond_estimate = float(diag.max() / diag.min())

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.singular:
            raise np.linalg.LinAlgError("matrix is singular")
        return scipy.linalg.lu_solve((self._lu, self._piv), rhs, check_finite=False)
