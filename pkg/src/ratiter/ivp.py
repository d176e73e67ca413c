"""Adaptive Runge-Kutta-Fehlberg 4(5) integration for scalar ODEs ``y' = f(x, y)``.

The fourth-order solution is propagated and the difference to the embedded
fifth-order solution drives the step size. Integration runs backward when
``x_end < x0``. Dense output is the cubic Hermite interpolant on ``(y, y')``
at accepted step endpoints.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

__all__ = [
    "IntegrationError",
    "IvpProblem",
    "EventSpec",
    "Trajectory",
    "rkf45_integrate",
    "dense_eval",
]

SAFETY = 0.9
FACTOR_MIN = 0.2
FACTOR_MAX = 5.0
EVENT_TOL = 1e-10

# Fehlberg's tableau
C2, C3, C4, C5, C6 = 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2
A21 = 1 / 4
A31, A32 = 3 / 32, 9 / 32
A41, A42, A43 = 1932 / 2197, -7200 / 2197, 7296 / 2197
A51, A52, A53, A54 = 439 / 216, -8.0, 3680 / 513, -845 / 4104
A61, A62, A63, A64, A65 = -8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40
B1, B3, B4, B5 = 25 / 216, 1408 / 2565, 2197 / 4104, -1 / 5
# fifth-order minus fourth-order weights
E1, E3, E4, E5, E6 = 1 / 360, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IvpProblem:
    rhs: Callable[[float, float], float]
    x0: float
    y0: float
    x_end: float


@dataclass(frozen=True)
class EventSpec:
    """Stop when ``guard(x, y)`` changes sign.

    ``direction`` is ``"up"`` for a negative-to-nonnegative crossing,
    ``"down"`` for the reverse and ``"any"`` for both, judged in the
    direction of integration.
    """

    guard: Callable[[float, float], float]
    direction: Literal["any", "up", "down"] = "any"
    name: str = "event"


@dataclass
class Trajectory:
    """Accepted steps of an integration plus what ended it."""

    xs: list[float]
    ys: list[float]
    fs: list[float] = field(repr=False)
    n_steps: int
    n_rejected: int
    terminated_by: Literal["reached_end", "event", "step_failure"]
    event: str | None = None

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs, self.ys))

    @property
    def x_final(self) -> float:
        return self.xs[-1]

    @property
    def y_final(self) -> float:
        return self.ys[-1]

    @property
    def steps(self) -> list[float]:
        """Signed accepted step sizes, one per interval."""
        return [b - a for a, b in zip(self.xs, self.xs[1:])]

    def __call__(self, x: float) -> float:
        return dense_eval(self, x)


def _hermite(xa, ya, fa, xb, yb, fb, x):
    h = xb - xa
    t = (x - xa) / h
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * fa
            + (-2 * t3 + 3 * t2) * yb + (t3 - t2) * h * fb)


def dense_eval(traj: Trajectory, x: float) -> float:
    """Interpolated solution at ``x`` inside the traversed interval."""
    xs = traj.xs
    forward = xs[-1] >= xs[0]
    lo, hi = (xs[0], xs[-1]) if forward else (xs[-1], xs[0])
    if not lo <= x <= hi:
        raise ValueError(f"x={x} outside the traversed interval [{lo}, {hi}]")
    if forward:
        k = bisect.bisect_left(xs, x)
    else:
        # bisect on the negated, increasing abscissae
        neg = _NegView(xs)
        k = bisect.bisect_left(neg, -x)
    if k < len(xs) and xs[k] == x:
        return traj.ys[k]
    k = max(k, 1)
    return _hermite(xs[k - 1], traj.ys[k - 1], traj.fs[k - 1], xs[k], traj.ys[k], traj.fs[k], x)


class _NegView(Sequence):
    def __init__(self, xs):
        self._xs = xs

    def __len__(self):
        return len(self._xs)

    def __getitem__(self, i):
        return -self._xs[i]


def _initial_step(rhs, x0, y0, f0, span, rtol, atol):
    """Starting step from the usual derivative-scale heuristic."""
    sc = atol + rtol * abs(y0)
    d0, d1 = abs(y0) / sc, abs(f0) / sc
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, abs(span))
    y1 = y0 + math.copysign(h0, span) * f0
    f1 = rhs(x0 + math.copysign(h0, span), y1)
    d2 = abs(f1 - f0) / sc / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, abs(span))


def _locate(guard, xa, ya, fa, xb, yb, fb, ga):
    """Bisect the Hermite interpolant of one step for a root of ``guard``."""
    lo, hi, g_lo = xa, xb, ga
    x = xb
    for _ in range(200):
        x = 0.5 * (lo + hi)
        y = _hermite(xa, ya, fa, xb, yb, fb, x)
        g = guard(x, y)
        if abs(g) <= EVENT_TOL or x in (lo, hi):
            return x, y
        if (g < 0) == (g_lo < 0):
            lo, g_lo = x, g
        else:
            hi = x
    return x, _hermite(xa, ya, fa, xb, yb, fb, x)


def _crossed(direction, g0, g1):
    if direction == "up":
        return g0 < 0 <= g1
    if direction == "down":
        return g0 >= 0 > g1
    return (g0 < 0) != (g1 < 0)


def rkf45_integrate(prob: IvpProblem, rtol: float = 1e-10, atol: float = 1e-12,
                    events: Sequence[EventSpec] = (), max_steps: int = 1_000_000,
                    h0: float | None = None) -> Trajectory:
    """Integrate ``prob`` from ``x0`` to ``x_end`` with Fehlberg's 4(5) pair.

    A step is accepted when the embedded error estimate satisfies
    ``|err| <= atol + rtol*max(|y_old|, |y_new|)``; the next step is scaled by
    ``0.9*(1/err)**(1/5)`` clamped to ``[0.2, 5]``. The first event that
    fires truncates the trajectory at the localized crossing.

    Raises
    ------
    IntegrationError
        When ``max_steps`` accepted steps do not reach ``x_end``.
    """
    if rtol < 1e-14 or atol < 0:
        raise ValueError("need rtol >= 1e-14 and atol >= 0")
    span = prob.x_end - prob.x0
    if span == 0:
        raise ValueError("x_end must differ from x0")
    f = prob.rhs
    direction = 1.0 if span > 0 else -1.0
    x, y = float(prob.x0), float(prob.y0)
    x_end = float(prob.x_end)
    fx = f(x, y)
    xs, ys, fs = [x], [y], [fx]
    guards = [ev.guard(x, y) for ev in events]
    h = abs(h0) if h0 else _initial_step(f, x, y, fx, span, rtol, atol)
    n_rej = 0
    status = "reached_end"
    fired = None

    while direction * (x_end - x) > 0:
        if len(xs) > max_steps:
            raise IntegrationError(f"max_steps={max_steps} exceeded at x={x}")
        if h < 1e-14 * abs(x) + 1e-300:
            status = "step_failure"
            break
        remaining = abs(x_end - x)
        last = h >= remaining
        if last:
            h = remaining
        hs = direction * h
        k1 = fx
        k2 = f(x + C2 * hs, y + hs * A21 * k1)
        k3 = f(x + C3 * hs, y + hs * (A31 * k1 + A32 * k2))
        k4 = f(x + C4 * hs, y + hs * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = f(x + hs, y + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = f(x + C6 * hs, y + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y_new = y + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5)
        err = abs(hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6))
        scale = atol + rtol * max(abs(y), abs(y_new))
        ratio = err / scale if scale > 0 else (0.0 if err == 0 else math.inf)
        if not math.isfinite(y_new) or not math.isfinite(ratio):
            n_rej += 1
            h *= FACTOR_MIN
            continue
        factor = FACTOR_MAX if ratio == 0 else min(FACTOR_MAX, max(FACTOR_MIN, SAFETY * ratio ** -0.2))
        if ratio > 1.0:
            n_rej += 1
            h *= min(factor, 0.9)
            continue

        x_new = x_end if last else x + hs
        f_new = f(x_new, y_new)
        if not math.isfinite(f_new):
            n_rej += 1
            h *= FACTOR_MIN
            continue
        for i, ev in enumerate(events):
            g_new = ev.guard(x_new, y_new)
            if _crossed(ev.direction, guards[i], g_new):
                xe, ye = _locate(ev.guard, x, y, fx, x_new, y_new, f_new, guards[i])
                cand = (abs(xe - x), i, xe, ye)
                fired = cand if fired is None or cand < fired else fired
            guards[i] = g_new
        if fired is not None:
            _, i, xe, ye = fired
            if xe != x:
                xs.append(xe)
                ys.append(ye)
                fs.append(f(xe, ye))
            status = "event"
            fired = events[i].name
            break
        x, y, fx = x_new, y_new, f_new
        xs.append(x)
        ys.append(y)
        fs.append(fx)
        h *= factor

    return Trajectory(xs, ys, fs, len(xs) - 1, n_rej, status,
                      fired if status == "event" else None)
