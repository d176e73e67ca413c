"""The anti-funnel solution of y' = 2 y^2 (y - x).

Backward shooting gives a reference value of y(0). One pass of the
rational-iteration pipeline improves the starting curve, and forward runs on
either side of the reference show the solutions peeling away.

Run: python3 demos/separatrix.py
"""

from ratiter.lemaitre_ode import (
    asymptotic_series,
    classify_forward,
    limit_curve,
    replicate_table,
    separatrix_trajectory,
)

for x_star in (1, 3, 10, 100):
    traj = separatrix_trajectory(x_star)
    print(f"from ({x_star}, {x_star}) backward: y(0) = {traj.y_final:.12f}  ({traj.n_steps} steps)")

series = asymptotic_series(8)
print("asymptotic coefficients c2..c8:", [str(c) for c in series.exact])

table = replicate_table()
print("\n   x      y1          y_rational  y_reference")
for x, y1, yr, ref in zip(table.x[::5], table.y1[::5], table.y_rational[::5], table.y_reference[::5]):
    print(f"{x:4.1f}  {y1:.8f}  {yr:.8f}  {ref:.8f}")
print("max error on [0, 2.2]: y1", f"{table.max_error('y1', 2.2):.2e},",
      "rational", f"{table.max_error('y_rational', 2.2):.2e}")

ref = separatrix_trajectory(10).y_final
for y0 in (ref + 1e-3, ref - 1e-3, limit_curve(0)):
    c = classify_forward(y0)
    print(f"y(0) = {y0:.6f}: {c.outcome} at x = {c.x_exit:.3f}")
