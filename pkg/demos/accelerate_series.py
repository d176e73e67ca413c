"""Speeding up slowly converging sequences with the delta-squared transform.

Run: python3 demos/accelerate_series.py
"""

import math

import numpy as np

from ratiter import RealSequence, acceleration_report, aitken_delta2, iterated_aitken

# Partial sums of 1 - 1/2 + 1/3 - ... creep towards log 2 with error ~ 1/n.
partial = RealSequence(np.cumsum([(-1) ** (k + 1) / k for k in range(1, 14)]))
print("plain partial sums, last error:", abs(partial.last - math.log(2)))

# Each level of the table removes the dominant geometric error mode.
for depth, row in enumerate(iterated_aitken(partial, 4)):
    print(f"depth {depth}: {len(row):2d} terms, last error {abs(row.last - math.log(2)):.2e}")

# A sequence that is exactly geometric is summed in one step.
geometric = RealSequence([3 + 2 * 0.7 ** n for n in range(6)])
print("geometric tail, transformed:", aitken_delta2(geometric).transformed.tolist())

# Fixed-point iteration of cos converges linearly; the transform shows it.
xs = [0.5]
for _ in range(20):
    xs.append(math.cos(xs[-1]))
report = acceleration_report(RealSequence(xs), 0.7390851332151607)
print("estimated order of plain iteration:", round(report.estimated_order, 2))
