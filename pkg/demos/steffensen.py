"""Steffensen's method next to plain successive approximation.

Run: python3 demos/steffensen.py
"""

import math

import numpy as np

from ratiter import FixedPointProblem, picard_iterate, steffensen_solve, vector_steffensen_solve

cos_problem = FixedPointProblem(math.cos)
rep = steffensen_solve(cos_problem, 0.5, atol=1e-14)
print(f"x = cos x: {rep.iterations} Steffensen steps -> {rep.solution!r}")
for k, x in enumerate(rep.trace):
    print(f"  k={k}  x_k={x:.15f}")

plain = picard_iterate(cos_problem, 0.5, 100).values
needed = int(np.argmax(np.abs(plain - rep.solution) <= 1e-12))
print(f"plain iteration needs {needed} steps for the same accuracy")

# exp(x) - 2 has |f'| > 1 at its fixed point: plain iteration runs away.
repelling = FixedPointProblem(lambda x: math.exp(x) - 2)
print("plain iteration from 1.0:", picard_iterate(repelling, 1.0, 4).tolist())
rep = steffensen_solve(repelling, 1.0)
print(f"Steffensen from 1.0: {rep.solution!r} after {rep.iterations} steps")

# Two unknowns, extrapolated coordinate by coordinate.
pair = FixedPointProblem(lambda v: np.array([np.cos(v[1]), np.sin(v[0])]) * 0.5 + 0.3, dimension=2)
rep = vector_steffensen_solve(pair, [0.0, 0.0])
print("2-d system:", rep.solution, "residual", rep.residual)
