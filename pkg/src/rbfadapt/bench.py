"""Timing micro-benchmark for the degree-extension shortcut.

Compares three ways of obtaining operator weights on synthetic random
stencils with n = M_(d,m+mu):

    tau_m     factorize and solve the degree-m saddle system,
    tau_mmu   factorize and solve the degree-(m+mu) saddle system,
    tau_ext   extend an existing degree-m solution by block elimination.

The extension timing charges only the reduced-system work (the P~^T Lambda
product, the small dense solve, and the weight update): the kernel-coefficient
columns Lambda are back-substituted against the already-factorized degree-m
system when that solution is produced, so their cost belongs to the degree-m
stage. This matches the advertised marginal cost of O(n (M_high - M_low)^2).
Assembly is excluded from all three timings, and BLAS pools are pinned to one
thread for stable measurements.
"""
from __future__ import annotations

import csv
import time
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import count_monomials, monomial_basis
from .stencils import Derivative, Stencil, monomial_action, operator_rhs

_N_SYNTHETIC = 16


def _single_threaded_blas():
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return nullcontext()
    return threadpool_limits(limits=1)


@dataclass
class TimingRow:
    d: int
    m: int
    mu: int
    n: int
    tau_m: float
    tau_mmu: float
    tau_ext: float

    @property
    def ratio_full(self) -> float:
        return self.tau_mmu / self.tau_m

    @property
    def ratio_ext(self) -> float:
        return self.tau_ext / self.tau_m


def _synthetic_case(d: int, m: int, mu: int, rng) -> dict:
    """Prebuilt matrices and right-hand sides for one random stencil."""
    n = count_monomials(d, m + mu)
    center = np.zeros(d)
    while True:
        nodes = rng.uniform(-1.0, 1.0, size=(n, d))
        try:
            stencil = Stencil(center=center, nodes=nodes, m=m, mu=mu)
            break
        except ValueError:
            continue
    op = Derivative(tuple(np.eye(d, dtype=int)[0]))
    basis_low = monomial_basis(d, m)
    basis_high = monomial_basis(d, m + mu)
    phi = np.linalg.norm(nodes[:, np.newaxis, :] - nodes[np.newaxis, :, :], axis=2) ** 3

    def saddle(p):
        size = n + p.shape[1]
        s = np.zeros((size, size))
        s[:n, :n] = phi
        s[:n, n:] = p
        s[n:, :n] = p.T
        return s

    p_low = basis_low.vandermonde(center, nodes)
    p_high = basis_high.vandermonde(center, nodes)
    m_low = len(basis_low)
    padded = np.zeros((n + m_low, n - m_low))
    padded[:n] = p_high[:, m_low:]
    case = {
        "s_low": saddle(p_low),
        "s_high": saddle(p_high),
        "rhs_low": operator_rhs(op, stencil, m),
        "rhs_high": operator_rhs(op, stencil, m + mu),
        "p_tilde_t": np.ascontiguousarray(p_high[:, m_low:].T),
        "padded": padded,
        "lpi_tilde": monomial_action(op, center, basis_high.exponents[m_low:]),
        "n": n,
    }
    # degree-m stage outputs, available to the extension step
    lu = scipy.linalg.lu_factor(case["s_low"], check_finite=False)
    case["w_low"] = scipy.linalg.lu_solve(lu, case["rhs_low"], check_finite=False)[:n]
    case["lam"] = scipy.linalg.lu_solve(lu, padded, check_finite=False)[:n]
    return case


def _time_loop(fn, cases, reps: int) -> float:
    fn(cases[0])  # warm caches before timing
    start = time.perf_counter()
    for i in range(reps):
        fn(cases[i % len(cases)])
    return (time.perf_counter() - start) / reps


def benchmark_case(d: int, m: int, mu: int, reps: int = 1000, seed: int = 0) -> TimingRow:
    rng = np.random.default_rng(seed)
    cases = [_synthetic_case(d, m, mu, rng) for _ in range(_N_SYNTHETIC)]
    n = cases[0]["n"]

    def solve_low(case):
        lu = scipy.linalg.lu_factor(case["s_low"], check_finite=False)
        scipy.linalg.lu_solve(lu, case["rhs_low"], check_finite=False)

    def solve_high(case):
        lu = scipy.linalg.lu_factor(case["s_high"], check_finite=False)
        scipy.linalg.lu_solve(lu, case["rhs_high"], check_finite=False)

    def solve_ext(case):
        reduced = case["p_tilde_t"] @ case["lam"]
        residual = case["p_tilde_t"] @ case["w_low"] - case["lpi_tilde"]
        correction = np.linalg.solve(reduced, residual)
        case["w_ext"] = case["w_low"] - case["lam"] @ correction

    with _single_threaded_blas():
        tau_m = _time_loop(solve_low, cases, reps)
        tau_mmu = _time_loop(solve_high, cases, reps)
        tau_ext = _time_loop(solve_ext, cases, reps)
    return TimingRow(d=d, m=m, mu=mu, n=n, tau_m=tau_m, tau_mmu=tau_mmu, tau_ext=tau_ext)


def run_timing_benchmark(d_list, m_list, mu_list, reps: int = 1000, seed: int = 0):
    rows = []
    for d in d_list:
        for m in m_list:
            for mu in mu_list:
                rows.append(benchmark_case(d, m, mu, reps=reps, seed=seed))
    return rows


def write_timing_csv(path, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["d", "m", "mu", "n", "tau_m", "tau_mmu", "tau_ext", "ratio_full", "ratio_ext"]
        )
        for r in rows:
            writer.writerow(
                [r.d, r.m, r.mu, r.n]
                + [
                    format(v, ".6e")
                    for v in (r.tau_m, r.tau_mmu, r.tau_ext, r.ratio_full, r.ratio_ext)
                ]
            )
