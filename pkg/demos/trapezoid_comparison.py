# Head-to-head with the textbook adaptive trapezoid rule (Simpson-minus-
# trapezoid error estimate): at matched achieved accuracy, the kernel method
# needs far fewer nodes even at its lowest order m=1, because each stencil
# extracts more accuracy per node and refinement is driven by a sharper
# estimate.
import numpy as np

from rbfadapt import AdaptiveConfig, make_test_function, run_adaptive
from rbfadapt.baselines import adaptive_trapezoid

print(f"{'seed':>4} {'kernel N':>9} {'kernel err':>11} {'trapz N':>8} {'trapz err':>10}")
kernel_all, trapz_all = [], []
for seed in range(10):
    tf = make_test_function("f2", 100.0, 1, seed)
    config = AdaptiveConfig(d=1, operator="quadrature", m=1, eps=1e-5, mu=2)
    report = run_adaptive(tf.eval, config, exact_value=tf.integral())
    matched = max(report.global_error, 1e-12)
    value, count = adaptive_trapezoid(tf.eval, -1.0, 1.0, matched)
    trapz_err = abs(value - tf.integral())
    kernel_all.append(report.n_nodes)
    trapz_all.append(count)
    print(f"{seed:>4} {report.n_nodes:>9} {report.global_error:>11.2e} "
          f"{count:>8} {trapz_err:>10.2e}")

print(f"\nmean nodes: kernel {np.mean(kernel_all):.0f} vs trapezoid {np.mean(trapz_all):.0f}")
print("(trapezoid rows with tiny N are runs where its three initial probes")
print(" missed the bumps entirely; the kernel method's ten-node grid is far")
print(" less prone to that failure mode, though not immune at extreme a.)")
