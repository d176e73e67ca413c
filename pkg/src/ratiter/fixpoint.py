"""Fixed-point solvers: plain successive approximation and Steffensen's method.

The Steffensen step is the rational-iteration formula
``(x1*x3 - x2**2) / (x1 - 2*x2 + x3)`` applied to ``(x, f(x), f(f(x)))``.
In several unknowns it is applied to each coordinate separately.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .accel import DEGENERATE_TOL, RealSequence, delta2_kernel

__all__ = [
    "NonFiniteMapError",
    "DivergenceWarning",
    "FixedPointProblem",
    "SolveReport",
    "picard_iterate",
    "rational_iteration_step",
    "compatibility_determinant",
    "steffensen_solve",
    "vector_steffensen_solve",
]

DIVERGENCE_BOUND = 1e100


class NonFiniteMapError(ArithmeticError):
    """The map returned NaN or an infinity."""


class DivergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class FixedPointProblem:
    map: Callable
    dimension: int = 1

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    def __call__(self, x):
        if self.dimension == 1:
            xf = float(np.reshape(x, -1)[0])
            y = float(self.map(xf))
            if not math.isfinite(y):
                raise NonFiniteMapError(f"map({xf!r}) = {y!r}")
            return y if np.ndim(x) == 0 else np.array([y])
        y = np.asarray(self.map(np.asarray(x, dtype=float)), dtype=float).reshape(self.dimension)
        if not np.all(np.isfinite(y)):
            raise NonFiniteMapError(f"map({x!r}) = {y!r}")
        return y


@dataclass
class SolveReport:
    """Outcome of an iterative solve.

    ``trace[0]`` is the initial guess and ``trace[k]`` the k-th outer
    iterate, so ``len(trace) == iterations + 1``. ``step_degenerate[k-1]``
    tells whether step ``k`` used the fallback in at least one coordinate.
    ``residual`` is ``|f(x) - x|`` (max-norm) at the returned solution.
    """

    solution: float | np.ndarray
    iterations: int
    trace: list
    converged: bool
    degenerate_steps: int = 0
    step_degenerate: list[bool] = field(default_factory=list)
    residual: float = math.nan


def picard_iterate(prob: FixedPointProblem, x0, n: int):
    """Return ``(x0, f(x0), f(f(x0)), ...)`` with ``n + 1`` points.

    Scalar problems give a :class:`RealSequence`, vector problems a list of
    arrays. If a coordinate exceeds 1e100 in magnitude the iteration stops
    early and a :class:`DivergenceWarning` is issued.
    """
    if n < 1:
        raise ValueError("n must be positive")
    scalar = prob.dimension == 1 and np.ndim(x0) == 0
    x = float(x0) if scalar else np.asarray(x0, dtype=float)
    points = [x]
    for k in range(n):
        x = prob(x)
        points.append(x)
        if np.max(np.abs(x)) > DIVERGENCE_BOUND:
            warnings.warn(f"Picard iteration diverged after {k + 1} steps", DivergenceWarning,
                          stacklevel=2)
            break
    return RealSequence(points) if scalar else points


def rational_iteration_step(x1: float, x2: float, x3: float,
                            degenerate_tol: float = DEGENERATE_TOL) -> float:
    """New approximation from three successive iterates; ``x3`` if degenerate."""
    value, _ = delta2_kernel(x1, x2, x3, degenerate_tol)
    return float(value)


def compatibility_determinant(x1: float, x2: float, x3: float) -> tuple[float, float]:
    """Expand ``det [[x2, 1, x1], [x3, 1, x2], [x, 1, x]]`` as ``a*x + b``.

    Expanding along the last row gives cofactors ``x2 - x1``,
    ``x1*x3 - x2**2`` and ``x2 - x3``. Returns ``(a, b)``; the root
    ``-b/a`` is the rational-iteration value.
    """
    return (x2 - x1) + (x2 - x3), x1 * x3 - x2 * x2


def _stopped(step: float, x_new: float, atol: float, rtol: float) -> bool:
    return step <= atol + rtol * x_new


def vector_steffensen_solve(prob: FixedPointProblem, x0, atol: float = 1e-14,
                            rtol: float = 0.0, maxit: int = 50,
                            degenerate_tol: float = DEGENERATE_TOL) -> SolveReport:
    """Componentwise Steffensen iteration for ``x = f(x)`` in ``d`` unknowns.

    Each outer step evaluates the full map twice, ``y1 = f(x)`` and
    ``y2 = f(y1)``, then extrapolates every coordinate from its own triple.
    Stops when the max-norm of the step is at most ``atol + rtol*max|x|``.
    """
    if atol < 0 or rtol < 0 or (atol == 0 and rtol == 0):
        raise ValueError("need atol >= 0, rtol >= 0, not both zero")
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    trace = [x.copy()]
    flags: list[bool] = []
    converged = False
    for _ in range(maxit):
        y1 = prob(x)
        y2 = prob(y1)
        x_new, degenerate = delta2_kernel(x, y1, y2, degenerate_tol)
        flags.append(bool(np.any(degenerate)))
        step = float(np.max(np.abs(x_new - x)))
        x = x_new
        trace.append(x.copy())
        if _stopped(step, float(np.max(np.abs(x))), atol, rtol):
            converged = True
            break
    residual = float(np.max(np.abs(prob(x) - x)))
    return SolveReport(x, len(trace) - 1, trace, converged, sum(flags), flags, residual)


def steffensen_solve(prob: FixedPointProblem, x0: float, atol: float = 1e-14,
                     rtol: float = 0.0, maxit: int = 50,
                     degenerate_tol: float = DEGENERATE_TOL) -> SolveReport:
    """Steffensen's method for a scalar fixed point ``x = f(x)``.

    Repeats ``y0 = x_k, y1 = f(y0), y2 = f(y1)`` and
    ``x_{k+1} = (y0*y2 - y1**2) / (y0 - 2*y1 + y2)`` until
    ``|x_{k+1} - x_k| <= atol + rtol*|x_{k+1}|``. A non-converged run returns
    its partial trace with ``converged=False``.

    Examples
    --------
    >>> rep = steffensen_solve(FixedPointProblem(lambda x: 0.3 * x + 0.7), 0.0)
    >>> rep.iterations, round(rep.trace[1], 12)
    (2, 1.0)
    """
    if prob.dimension != 1:
        raise ValueError("steffensen_solve is scalar; use vector_steffensen_solve")
    rep = vector_steffensen_solve(prob, [float(x0)], atol, rtol, maxit, degenerate_tol)
    rep.solution = float(rep.solution[0])
    rep.trace = [float(v[0]) for v in rep.trace]
    return rep
