"""Normalized real-zero counts as q approaches 1 and -1, and a sign ladder.

Run with ``python demos/densities.py``; takes under a minute.
"""
import math

from partheta.density import dense_zero_probe, density_sweep

print("(1-q) * #zeros in [-100, -e^pi]  vs  ln(100/e^pi) =", f"{math.log(100 / math.exp(math.pi)):.4f}")
for r in density_sweep("positive", 100, [0.9, 0.95, 0.98, 0.99]):
    print(f"  q = {r.q:5.2f}  count {r.counts['ell_a']:4d}  normalized {r.normalized:.4f}"
          f"  deviation {r.relative_deviation:6.2%}")

print("\n(1+q) * #zeros in [-100, -e^(pi/2)] and [e^(pi/2), 100]  vs",
      f"{math.log(100 / math.exp(math.pi / 2)) / 2:.4f}")
for r in density_sweep("negative", 100, [-0.9, -0.95, -0.98]):
    print(f"  q = {r.q:5.2f}  counts {r.counts['n_a']:3d} / {r.counts['p_a']:3d}"
          f"  normalized {r.normalized:.4f} / {r.normalized_p:.4f}")

probe = dense_zero_probe(30)
print(f"\nsign ladder at the 30th positive spectral number (q = {probe.q:.6f}):")
print(f"  theta(x_1) = {probe.values[1]:.12f}")
print(f"  {len(probe.zeros)} bracketed zeros in [-100, -e^pi], widest bracket {probe.max_gap:.3f}"
      f" <= (1-q)*100 = {(1 - probe.q) * 100:.3f}")
