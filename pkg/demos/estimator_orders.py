# How trustworthy is the two-degree error estimate? On a shrinking stencil
# the estimate tracks the true error of the degree-m rule and converges one
# order faster than the rule itself, so their ratio drifts slowly toward one
# from either side. This script prints both quantities across a range of
# spacings and degrees for per-cell quadrature of exp(x).
import numpy as np

from rbfadapt import IntegralOver, Interval, Stencil, error_estimate, weight_pair
from rbfadapt.basis import count_monomials

for m in (1, 2, 3):
    mu = 2
    n = count_monomials(1, m + mu)
    print(f"\nm={m}, mu={mu}, {n}-node stencils, cell [0, h], f = exp:")
    print(f"  {'h':>8} {'estimate':>12} {'true error':>12} {'ratio':>7}")
    previous = None
    for h in (0.4, 0.2, 0.1, 0.05, 0.025):
        nodes = (np.arange(n) * h).reshape(-1, 1)
        stencil = Stencil(center=[h / 2], nodes=nodes, m=m, mu=mu)
        pair = weight_pair(stencil, IntegralOver(Interval(0.0, h)))
        values = np.exp(nodes[:, 0])
        estimate = error_estimate(pair, values)
        truth = abs(float(values @ pair.w_m[:, 0]) - (np.exp(h) - 1.0))
        note = ""
        if previous is not None:
            note = f"   order {np.log2(previous / estimate):.2f}"
        print(f"  {h:>8.3f} {estimate:>12.3e} {truth:>12.3e} {estimate/truth:>7.2f}{note}")
        previous = estimate
