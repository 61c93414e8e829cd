# A first look at local operator weights: build one stencil, solve for the
# quadrature weights at two polynomial degrees, and read off the built-in
# error estimate. Everything downstream (the adaptive driver, the CLI) is
# this computation in a loop.
import numpy as np

from rbfadapt import (
    Interval,
    IntegralOver,
    Stencil,
    assemble_system,
    error_estimate,
    extend_weights,
    solve_weights,
    weight_pair,
)

# Four nodes around a small cell [0, h]; with m=1 the local model is the
# cubic kernel plus a linear polynomial tail.
h = 0.1
nodes = np.array([[-h], [0.0], [h], [2 * h]])
stencil = Stencil(center=[h / 2], nodes=nodes, m=1, mu=2)
cell = IntegralOver(Interval(0.0, h))

system = assemble_system(stencil)
print(f"saddle system: {system.matrix.shape[0]}x{system.matrix.shape[1]}, "
      f"condition estimate {system.cond_estimate:.1e}")

w_low = solve_weights(system, cell, stencil)
print("degree-1 quadrature weights:", np.round(w_low[:, 0], 6))

# Degree extension reuses the factorization: no second full solve.
w_high = extend_weights(system, w_low, cell, stencil)
print("degree-3 quadrature weights:", np.round(w_high[:, 0], 6))

# The weight difference applied to function values is the error estimate.
pair = weight_pair(stencil, cell)
for name, f in [("exp(x)", np.exp), ("x^3 - x", lambda x: x**3 - x)]:
    values = f(nodes[:, 0])
    low = float(values @ pair.w_m[:, 0])
    high = float(values @ pair.w_mmu[:, 0])
    print(f"f = {name}: integral~{low:.8f}, estimate {error_estimate(pair, values):.2e}, "
          f"(two-degree spread {abs(low - high):.2e})")

# Exactness check: any straight line is integrated exactly by both rules.
line = 2.0 * nodes[:, 0] + 1.0
print("line integrated exactly:",
      np.isclose(float(line @ pair.w_m[:, 0]), h * (h + 1.0)))
