"""Rational iteration for ``y' = 2 y**2 (y - x)`` on ``0 <= x < oo``.

The wanted solution is the one asymptotic to ``y = x``; it threads the
anti-funnel between the line ``y = x`` and the isocline of slope 1. Since
``d/dx (1/y) = -2 (y - x)`` along solutions, the equation can be iterated two
ways on a grid:

* differentiation: ``y0 = x - (1/2) d/dx (1/y1)``
* integration:     ``1/y2 = 2 * integral_x^oo (y1 - t) dt``

and the three approximations are combined pointwise with the
delta-squared formula. The first approximation ``y1`` is the inflection
curve ``2 y (y - x)(3 y - 2 x) = 1``. A backward-shot separatrix serves as
the reference solution.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .accel import DEGENERATE_TOL, delta2_kernel
from .ivp import EventSpec, IntegrationError, IvpProblem, Trajectory, rkf45_integrate

__all__ = [
    "GridMismatchError",
    "GridFunction",
    "AsymptoticSeries",
    "SeparatrixClassification",
    "ReplicationTable",
    "rhs",
    "isocline",
    "limit_curve",
    "initial_grid",
    "picard_differential",
    "picard_integral",
    "rational_iteration_grid",
    "asymptotic_series",
    "separatrix_trajectory",
    "separatrix_y0",
    "classify_forward",
    "replicate_table",
    "TABLE_COLUMNS",
]

#: y(0) of the separatrix from backward shooting, 12 digits.
SEPARATRIX_Y0 = 0.618340077404
#: Historical hand-computed value of y(0).
LEMAITRE_Y0 = 0.618343

TABLE_COLUMNS = ("x", "y1", "y0", "y2", "y_rational", "y_reference", "flag_degenerate")


class GridMismatchError(ValueError):
    pass


def rhs(x: float, y: float) -> float:
    return 2.0 * y * y * (y - x)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``y(x_lo + k*h)`` for ``k = 0 .. (x_hi - x_lo)/h``."""

    x_lo: float
    x_hi: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step must be positive")
        n = (self.x_hi - self.x_lo) / self.h
        if abs(n - round(n)) > 1e-9:
            raise ValueError(f"(x_hi - x_lo)/h = {n} is not an integer")
        vals = np.array(self.values, dtype=float)
        if vals.shape != (round(n) + 1,):
            raise ValueError(f"expected {round(n) + 1} values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, func, x_lo: float, x_hi: float, h: float) -> "GridFunction":
        n = round((x_hi - x_lo) / h)
        xs = x_lo + h * np.arange(n + 1)
        return cls(x_lo, x_hi, h, np.array([func(x) for x in xs]))

    @property
    def intervals(self) -> int:
        return len(self.values) - 1

    @property
    def nodes(self) -> np.ndarray:
        return self.x_lo + self.h * np.arange(len(self.values))

    def same_grid(self, other: "GridFunction") -> bool:
        return (len(self.values) == len(other.values)
                and math.isclose(self.x_lo, other.x_lo, abs_tol=1e-12)
                and math.isclose(self.h, other.h, rel_tol=1e-12))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x_lo, self.x_hi, self.h, values)


@dataclass(frozen=True)
class AsymptoticSeries:
    """Truncated expansion ``y(x) ~ x + sum_{j=2}^{K} c_j x**-j``."""

    exact: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.exact) + 1

    @property
    def coefficients(self) -> tuple[float, ...]:
        """``(c_2, ..., c_K)`` as floats."""
        return tuple(float(c) for c in self.exact)

    def _terms(self):
        return [(j, float(c)) for j, c in enumerate(self.exact, start=2) if c]

    def __call__(self, x: float) -> float:
        return x + sum(c * x ** -j for j, c in self._terms())

    def derivative(self, x: float) -> float:
        return 1.0 - sum(j * c * x ** -(j + 1) for j, c in self._terms())

    def tail(self, X: float) -> float:
        """``integral_X^oo (y(t) - t) dt`` of the truncated series."""
        return sum(c * X ** -(j - 1) / (j - 1) for j, c in self._terms())

    def residual(self, x: float) -> float:
        """``y' - 2 y**2 (y - x)`` of the truncated series at ``x``."""
        return self.derivative(x) - rhs(x, self(x))


@dataclass(frozen=True)
class SeparatrixClassification:
    outcome: Literal["stays_in_antifunnel", "exits_above", "crosses_isocline0"]
    x_exit: float | None = None


def _bracketed_root(g, lo: float, hi: float) -> float:
    return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def isocline(p: float, x: float) -> float:
    """The root ``y > x`` of ``2 y**2 (y - x) = p``."""
    if p <= 0 or x < 0:
        raise ValueError("need p > 0 and x >= 0")
    hi = x + max(1.0, (p / 2) ** (1 / 3) + 1)
    return _bracketed_root(lambda y: 2 * y * y * (y - x) - p, x, hi)


def limit_curve(x: float) -> float:
    """The root ``y > x`` of ``2 y (y - x)(3 y - 2 x) = 1``.

    For ``y > x >= 0`` the left side increases in ``y``, so the root is
    unique.
    """
    if x < 0:
        raise ValueError("need x >= 0")
    return _bracketed_root(lambda y: 2 * y * (y - x) * (3 * y - 2 * x) - 1, x, x + 1.0)


def initial_grid(x_lo: float = 0.0, x_hi: float = 3.0, h: float = 0.1) -> GridFunction:
    return GridFunction.sample(limit_curve, x_lo, x_hi, h)


def picard_differential(y1: GridFunction) -> GridFunction:
    """``y0 = x - (1/2) d/dx (1/y1)`` with second-order differences.

    Central differences inside, one-sided three-point differences at the
    two ends.
    """
    if len(y1.values) < 3:
        raise ValueError("need at least 3 nodes")
    if np.any(y1.values <= 0):
        raise ValueError("y1 must be positive")
    deriv = np.gradient(1.0 / y1.values, y1.h, edge_order=2)
    return y1.with_values(y1.nodes - 0.5 * deriv)


def _integrals_to_right(f: np.ndarray, h: float) -> np.ndarray:
    """``integral_{x_k}^{x_N} f`` for every node ``k``, fourth order.

    Even interval counts use composite Simpson. Odd counts of at least three
    put the 3/8 rule on the first three intervals; a single last interval
    integrates the parabola through the final three nodes.
    """
    n = len(f) - 1
    out = np.zeros(n + 1)
    # Simpson sums from the right over pairs of intervals
    simpson = np.zeros(n + 1)
    for k in range(n - 2, -1, -2):
        simpson[k] = simpson[k + 2] + h / 3 * (f[k] + 4 * f[k + 1] + f[k + 2])
    for k in range(n + 1):
        m = n - k
        if m % 2 == 0:
            out[k] = simpson[k]
        elif m >= 3:
            out[k] = 3 * h / 8 * (f[k] + 3 * f[k + 1] + 3 * f[k + 2] + f[k + 3]) + simpson[k + 3]
        else:
            out[k] = h / 12 * (-f[n - 2] + 8 * f[n - 1] + 5 * f[n])
    return out


def picard_integral(y1: GridFunction, series: AsymptoticSeries | None = None,
                    tail: float | None = None) -> GridFunction:
    """``1/y2 = 2 * integral_x^oo (y1 - t) dt`` on the grid of ``y1``.

    The integral up to ``x_hi`` is done on the grid; beyond it the tail
    ``integral_{x_hi}^oo (y - t) dt`` is taken from ``series``, or given
    directly as ``tail``.
    """
    if (series is None) == (tail is None):
        raise ValueError("pass exactly one of series or tail")
    if y1.intervals % 2:
        raise ValueError(f"Simpson needs an even number of intervals, got {y1.intervals}")
    if series is not None:
        if series.order < 2:
            raise ValueError("series order must be at least 2")
        tail = series.tail(y1.x_hi)
    recip = 2.0 * (_integrals_to_right(y1.values - y1.nodes, y1.h) + tail)
    if np.any(recip <= 0):
        raise ValueError("1/y2 is not positive; y1 is not a usable approximation")
    return y1.with_values(1.0 / recip)


def rational_iteration_grid(y0: GridFunction, y1: GridFunction, y2: GridFunction,
                            degenerate_tol: float = DEGENERATE_TOL
                            ) -> tuple[GridFunction, np.ndarray]:
    """Pointwise ``(y0*y2 - y1**2) / (y0 - 2*y1 + y2)``.

    Returns the new grid function and a boolean mask of the nodes where the
    denominator was negligible and ``y2`` was kept.
    """
    if not (y0.same_grid(y1) and y1.same_grid(y2)):
        raise GridMismatchError("the three approximations must share one grid")
    value, degenerate = delta2_kernel(y0.values, y1.values, y2.values, degenerate_tol)
    return y1.with_values(value), degenerate


def asymptotic_series(order: int = 6) -> AsymptoticSeries:
    """Coefficients ``c_2 .. c_K`` by matching powers of ``1/x``.

    With ``u = y - x = sum c_j w**j`` and ``w = 1/x`` the equation reads
    ``1 + u' = 2 x**2 u + 4 x u**2 + 2 u**3``. The coefficient of ``w**k``
    fixes ``c_{k+2}`` from lower ones; the arithmetic is exact.
    """
    if not 2 <= order <= 12:
        raise ValueError("order must lie in 2..12")
    c: dict[int, Fraction] = {}

    def power_coeff(power: int, k: int) -> Fraction:
        # coefficient of w**k in u**power, using the known c_j
        if power == 1:
            return c.get(k, Fraction(0))
        total = Fraction(0)
        for j, cj in c.items():
            if k - j >= 0:
                total += cj * power_coeff(power - 1, k - j)
        return total

    for k in range(order - 1):
        rest = 4 * power_coeff(2, k + 1) + 2 * power_coeff(3, k)
        if k == 0:
            rest -= 1
        # -u' contributes (j) c_j w**(j+1) with j = k - 1
        rest += (k - 1) * c.get(k - 1, Fraction(0))
        c[k + 2] = -rest / 2
    return AsymptoticSeries(tuple(c[j] for j in range(2, order + 1)))


def separatrix_trajectory(x_star: float = 10.0, rtol: float = 1e-14,
                          atol: float = 1e-16) -> Trajectory:
    """Backward integration from ``y(x_star) = x_star`` down to ``x = 0``.

    Backward in ``x`` the neighbouring solutions contract onto the
    separatrix, so the starting error dies out.
    """
    if x_star < 1:
        raise ValueError("x_star must be at least 1")
    traj = rkf45_integrate(IvpProblem(rhs, x_star, x_star, 0.0), rtol=rtol, atol=atol)
    if traj.terminated_by != "reached_end":
        raise IntegrationError(f"backward shooting stopped: {traj.terminated_by}")
    return traj


def separatrix_y0(x_star: float = 10.0, rtol: float = 1e-14, atol: float = 1e-16) -> float:
    """``y(0)`` of the solution through ``(x_star, x_star)``, integrated backward."""
    return separatrix_trajectory(x_star, rtol, atol).y_final


def classify_forward(y0_val: float, x_max: float = 3.0, rtol: float = 1e-12,
                     atol: float = 1e-14) -> SeparatrixClassification:
    """Follow the solution with ``y(0) = y0_val`` forward and see how it leaves.

    It exits above when ``2 y**2 (y - x)`` rises through 1 and crosses the
    isocline 0 when ``y - x`` falls through 0.
    """
    if y0_val <= 0 or x_max <= 0:
        raise ValueError("need y0_val > 0 and x_max > 0")
    events = (
        EventSpec(lambda x, y: rhs(x, y) - 1.0, "up", "exits_above"),
        EventSpec(lambda x, y: y - x, "down", "crosses_isocline0"),
    )
    try:
        traj = rkf45_integrate(IvpProblem(rhs, 0.0, y0_val, x_max), rtol=rtol, atol=atol,
                               events=events)
    except IntegrationError:
        # runaway growth exhausts the step budget only above the anti-funnel
        return SeparatrixClassification("exits_above", None)
    if traj.terminated_by == "event":
        return SeparatrixClassification(traj.event, traj.x_final)
    if traj.terminated_by == "step_failure":
        return SeparatrixClassification("exits_above", traj.x_final)
    return SeparatrixClassification("stays_in_antifunnel", None)


@dataclass(frozen=True)
class ReplicationTable:
    x: np.ndarray
    y1: np.ndarray
    y0: np.ndarray
    y2: np.ndarray
    y_rational: np.ndarray
    y_reference: np.ndarray
    flag_degenerate: np.ndarray

    def rows(self):
        for k in range(len(self.x)):
            yield tuple(getattr(self, name)[k] for name in TABLE_COLUMNS)

    def max_error(self, column: str = "y_rational", x_max: float = math.inf) -> float:
        mask = self.x <= x_max + 1e-12
        return float(np.max(np.abs(getattr(self, column)[mask] - self.y_reference[mask])))

    def to_csv(self, stream=None) -> str | None:
        """Write the table with 12 significant digits.

        Returns the text when ``stream`` is None.
        """
        out = io.StringIO() if stream is None else stream
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        for row in self.rows():
            *nums, flag = row
            writer.writerow([f"{v:.12g}" for v in nums] + ["true" if flag else "false"])
        return out.getvalue() if stream is None else None


def replicate_table(h: float = 0.1, x_hi: float = 3.0, series_order: int = 6,
                    sweeps: int = 1, x_star: float = 10.0) -> ReplicationTable:
    """Run the whole pipeline and set it beside the shooting reference.

    ``sweeps > 1`` feeds the corrected curve back in as the next first
    approximation.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be at least 1")
    series = asymptotic_series(series_order)
    first = initial_grid(0.0, x_hi, h)
    y1 = first
    for sweep in range(sweeps):
        if sweep:
            y1 = corrected
        y0 = picard_differential(y1)
        y2 = picard_integral(y1, series)
        corrected, degenerate = rational_iteration_grid(y0, y1, y2)
    ref = separatrix_trajectory(x_star)
    xs = first.nodes
    y_ref = np.array([ref(x) for x in xs])
    return ReplicationTable(xs, y1.values.copy(), y0.values.copy(), y2.values.copy(),
                            corrected.values.copy(), y_ref, degenerate)
