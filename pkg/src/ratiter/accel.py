"""Finite differences, the Aitken delta-squared transform and its iterates.

All transforms take and return :class:`RealSequence` values, which are
immutable; nothing here mutates its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "DEGENERATE_TOL",
    "SequenceTooShortError",
    "RealSequence",
    "AitkenResult",
    "AccelerationReport",
    "delta2_kernel",
    "forward_difference",
    "aitken_delta2",
    "iterated_aitken",
    "acceleration_report",
]

#: Relative tolerance below which a second difference counts as zero.
#: Shared by every module that applies the delta-squared formula.
DEGENERATE_TOL = 1e-13


class SequenceTooShortError(ValueError):
    """Raised when a sequence has too few terms for the requested operation."""


@dataclass(frozen=True, eq=False)
class RealSequence:
    """Finite indexed sequence of finite real numbers.

    ``values[0]`` carries the index ``offset``; transforms keep the offset of
    their input so that ``s_n`` and its transform share the index ``n``.
    """

    values: np.ndarray
    offset: int = 0

    def __init__(self, values: Iterable[float], offset: int = 0, *, _allow_empty: bool = False):
        arr = np.array(list(values) if not isinstance(values, np.ndarray) else values,
                       dtype=float)
        if arr.ndim != 1:
            raise ValueError("a RealSequence is one-dimensional")
        if arr.size == 0 and not _allow_empty:
            raise ValueError("a RealSequence needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("a RealSequence only admits finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "offset", int(offset))

    @classmethod
    def empty(cls, offset: int = 0) -> "RealSequence":
        return cls((), offset, _allow_empty=True)

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self) -> Iterator[float]:
        return iter(self.values.tolist())

    def __getitem__(self, item):
        if isinstance(item, slice):
            start = item.indices(len(self))[0]
            if item.step not in (None, 1):
                raise ValueError("only contiguous slices are supported")
            return RealSequence(self.values[item], self.offset + start, _allow_empty=True)
        return float(self.values[item])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RealSequence):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"RealSequence({self.values.tolist()!r}, offset={self.offset})"

    def tolist(self) -> list[float]:
        return self.values.tolist()

    @property
    def last(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class AitkenResult:
    transformed: RealSequence
    degenerate_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class AccelerationReport:
    """Error diagnostics of a sequence against a known limit."""

    errors: RealSequence
    ratios: RealSequence
    estimated_order: float


def delta2_kernel(a, b, c, degenerate_tol: float = DEGENERATE_TOL):
    """Delta-squared extrapolation of the triple ``(a, b, c)``, elementwise.

    Returns ``(value, degenerate)``. The value equals
    ``(a*c - b**2) / (a - 2*b + c)`` but is evaluated as
    ``c - (c - b)**2 / (a - 2*b + c)``, which avoids the cancellation in the
    numerator. Where the denominator is negligible relative to
    ``|a| + |b| + |c| + 1`` the value falls back to ``c`` and the
    degenerate flag is set.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    denom = (c - b) - (b - a)
    degenerate = np.abs(denom) <= degenerate_tol * (np.abs(a) + np.abs(b) + np.abs(c) + 1.0)
    safe = np.where(degenerate, 1.0, denom)
    value = np.where(degenerate, c, c - (c - b) ** 2 / safe)
    return value, degenerate


def forward_difference(s: RealSequence, k: int = 1) -> RealSequence:
    """k-th forward difference; the result has ``len(s) - k`` terms."""
    if k < 1:
        raise ValueError("difference order must be positive")
    if len(s) <= k:
        raise SequenceTooShortError(f"need more than {k} terms, got {len(s)}")
    return RealSequence(np.diff(s.values, n=k), s.offset)


def aitken_delta2(s: RealSequence, degenerate_tol: float = DEGENERATE_TOL) -> AitkenResult:
    """Apply the delta-squared transform to every consecutive triple of ``s``.

    Parameters
    ----------
    s : RealSequence
        At least three terms.
    degenerate_tol : float
        Relative threshold for the second difference; see
        :func:`delta2_kernel`.

    Returns
    -------
    AitkenResult
        ``transformed`` has ``len(s) - 2`` terms and the same offset as
        ``s``. ``degenerate_indices`` are positions (0-based, into
        ``transformed``) where the fallback to ``s[n + 2]`` was used.
    """
    if len(s) < 3:
        raise SequenceTooShortError(f"delta-squared needs 3 terms, got {len(s)}")
    v = s.values
    value, degenerate = delta2_kernel(v[:-2], v[1:-1], v[2:], degenerate_tol)
    return AitkenResult(RealSequence(value, s.offset),
                        tuple(int(i) for i in np.flatnonzero(degenerate)))


def iterated_aitken(s: RealSequence, depth: int,
                    degenerate_tol: float = DEGENERATE_TOL) -> list[RealSequence]:
    """Triangular table ``[s, A(s), A(A(s)), ...]`` with ``depth + 1`` rows."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if len(s) < 2 * depth + 1:
        raise SequenceTooShortError(
            f"depth {depth} needs {2 * depth + 1} terms, got {len(s)}")
    rows = [s]
    for _ in range(depth):
        rows.append(aitken_delta2(rows[-1], degenerate_tol).transformed)
    return rows


def _tail_slope(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) < 2:
        return math.nan
    slope, _ = np.polyfit(np.asarray(x), np.asarray(y), 1)
    return float(slope)


def acceleration_report(s: RealSequence, limit: float) -> AccelerationReport:
    """Errors, error ratios and the empirical convergence order of ``s``.

    ``estimated_order`` is the least-squares slope of ``log e[n+1]`` against
    ``log e[n]`` over the second half of the usable pairs (both errors
    nonzero). It is NaN when fewer than two such pairs exist.
    """
    if len(s) < 3:
        raise SequenceTooShortError(f"need at least 3 terms, got {len(s)}")
    errors = np.abs(s.values - limit)
    idx = [n for n in range(len(errors) - 1) if errors[n] > 0]
    ratios = [errors[n + 1] / errors[n] for n in idx]

    pairs = [n for n in idx if errors[n + 1] > 0]
    tail = pairs[len(pairs) // 2:] if len(pairs) > 3 else pairs
    order = _tail_slope([math.log(errors[n]) for n in tail],
                        [math.log(errors[n + 1]) for n in tail])
    ratio_seq = RealSequence(ratios, s.offset) if ratios else RealSequence.empty(s.offset)
    return AccelerationReport(RealSequence(errors, s.offset), ratio_seq, order)
