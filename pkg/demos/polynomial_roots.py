"""Polynomial roots from a recurrent series and Hankel determinant quotients.

Run: python3 demos/polynomial_roots.py
"""

import numpy as np

from ratiter import Polynomial, all_roots, bernoulli_sequence, dominant_root, root_products

p = Polynomial.from_roots([4.0, -2.5, 1.0, 0.3])
series = bernoulli_sequence(p, n=60)

# Ratios of successive terms tend to the root of largest modulus.
print("dominant root:", dominant_root(series).value)

# Quotients of order-m Hankel determinants tend to z1 * ... * zm.
for m in range(1, p.degree + 1):
    print(f"m={m}: product of the {m} largest roots ~ {root_products(series, m).last:.12g}")

for r in all_roots(p):
    print(f"root {r.value:+.12f}  |p(root)| = {r.residual:.1e}")
ref = sorted(np.roots(p.coefficients[::-1]).real, key=abs, reverse=True)
print("numpy.roots for comparison:", ", ".join(f"{v:+.12f}" for v in ref))
