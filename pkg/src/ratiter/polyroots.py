"""Polynomial roots from recurrent series: Bernoulli's ratio and Hankel quotients.

The recurrent series is generated in exact rational arithmetic. Hankel
determinants of a series dominated by one root are tiny differences of large
products; in floating point a ``j x j`` minor at index ``i`` loses roughly
``i * log10(|z1|**j / |z1 ... zj|)`` digits, which ruins the quotients long
before they converge. Exact values keep every quotient correctly rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .accel import DEGENERATE_TOL, RealSequence, SequenceTooShortError, aitken_delta2

__all__ = [
    "NonConvergenceError",
    "Polynomial",
    "RecurrentSeries",
    "RootEstimate",
    "bernoulli_sequence",
    "dominant_root",
    "hankel_det",
    "hankel_ratios",
    "root_products",
    "all_roots",
    "smallest_root_bernoulli",
]

#: Tail-stability threshold: the last three estimates may spread by this
#: fraction of their magnitude at most.
TAIL_SPREAD = 0.10
#: Float views of a series are rescaled by powers of two past this magnitude.
RESCALE_ABOVE = 1e150


class NonConvergenceError(ArithmeticError):
    def __init__(self, message: str, failed: Sequence[int] = ()):
        super().__init__(message)
        self.failed = tuple(failed)


@dataclass(frozen=True)
class Polynomial:
    """Monic polynomial ``z**p + b[p-1] z**(p-1) + ... + b[0]``.

    ``coefficients`` are stored in ascending order and end with ``1.0``;
    a non-monic input is divided through by its leading coefficient.
    """

    coefficients: tuple[float, ...]

    def __init__(self, coefficients: Sequence[float]):
        coeffs = [float(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0.0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("polynomial must have degree at least 1")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite")
        lead = coeffs[-1]
        if lead != 1.0:
            coeffs = [c / lead for c in coeffs[:-1]] + [1.0]
        if coeffs[0] == 0.0:
            raise ValueError("b_0 is zero: deflate the zero root first")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[float]) -> "Polynomial":
        return cls(np.polynomial.polynomial.polyfromroots(roots).tolist())

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc


@dataclass(frozen=True)
class RecurrentSeries:
    """Terms ``s_0 ... s_N`` of the recurrence attached to ``source``.

    ``exact`` holds the terms as fractions. ``values`` is the float view,
    multiplied by ``2**scale_exponent`` when the raw terms would overflow;
    every term is scaled alike, so ratios are unaffected.
    """

    source: Polynomial
    values: RealSequence
    seeds: tuple[float, ...]
    exact: tuple[Fraction, ...] = field(repr=False, default=())
    scale_exponent: int = 0


@dataclass(frozen=True)
class RootEstimate:
    value: complex | float
    modulus_rank: int
    residual: float
    stable: bool = True


def _float_view(exact: Sequence[Fraction]) -> tuple[np.ndarray, int]:
    biggest = max((abs(v) for v in exact), default=Fraction(0))
    exponent = 0
    if biggest > RESCALE_ABOVE:
        # largest power of two keeping the biggest term near 1e150 or below
        log2_big = biggest.numerator.bit_length() - biggest.denominator.bit_length()
        exponent = 498 - log2_big
    scale = Fraction(2) ** exponent
    try:
        arr = np.array([float(v * scale) for v in exact])
    except OverflowError as exc:  # pragma: no cover - guarded by rescaling
        raise OverflowError("series term exceeds the float range") from exc
    return arr, exponent


def bernoulli_sequence(p: Polynomial, seeds: Sequence[float] | None = None,
                       n: int = 40) -> RecurrentSeries:
    """Generate ``s_0 ... s_n`` with ``s_{k+p} = -(b_{p-1} s_{k+p-1} + ... + b_0 s_k)``.

    Empty or missing ``seeds`` default to ``(0, ..., 0, 1)``.
    """
    deg = p.degree
    if not seeds:
        seeds = [0.0] * (deg - 1) + [1.0]
    if len(seeds) != deg:
        raise ValueError(f"need {deg} seeds, got {len(seeds)}")
    if all(s == 0 for s in seeds):
        raise ValueError("seeds must not all be zero")
    if n < deg:
        raise ValueError("n must be at least the degree")

    b = [Fraction(c) for c in p.coefficients[:-1]]
    s = [Fraction(float(v)) for v in seeds]
    while len(s) <= n:
        k = len(s) - deg
        s.append(-sum(b[j] * s[k + j] for j in range(deg)))
    arr, exponent = _float_view(s)
    return RecurrentSeries(p, RealSequence(arr), tuple(float(v) for v in seeds),
                           tuple(s), exponent)


def _exact_terms(series: RecurrentSeries) -> list[Fraction]:
    if series.exact:
        return list(series.exact)
    return [Fraction(v) for v in series.values.values.tolist()]


def _spread(tail: Sequence[float]) -> float:
    scale = max(abs(t) for t in tail)
    if scale == 0:
        return 0.0
    return (max(tail) - min(tail)) / scale


def _limit_of(ratios: Sequence[float], accelerate: bool) -> tuple[float, bool]:
    """Final estimate of a ratio sequence and whether its tail is stable."""
    stable = len(ratios) >= 3 and _spread(ratios[-3:]) <= TAIL_SPREAD
    if accelerate and len(ratios) >= 3:
        return aitken_delta2(RealSequence(ratios), DEGENERATE_TOL).transformed.last, stable
    return ratios[-1], stable


def _ratio_tail(terms: Sequence[Fraction]) -> list[float]:
    """Ratios ``s_{k+1}/s_k`` after the last vanishing denominator."""
    if terms[-2] == 0:
        raise ZeroDivisionError("trailing series term is zero")
    start = max((k + 1 for k in range(len(terms) - 1) if terms[k] == 0), default=0)
    return [float(terms[k + 1] / terms[k]) for k in range(start, len(terms) - 1)]


def dominant_root(series: RecurrentSeries, accelerate: bool = False) -> RootEstimate:
    """Largest-modulus root from the ratio of consecutive series terms.

    With ``accelerate`` the ratio sequence is passed through the
    delta-squared transform first. ``stable`` is False when the last three
    ratios spread by more than 10%.
    """
    terms = _exact_terms(series)
    if len(terms) < 5:
        raise SequenceTooShortError("dominant_root needs at least 5 terms")
    ratios = _ratio_tail(terms)
    value, stable = _limit_of(ratios, accelerate)
    return RootEstimate(value, 1, abs(series.source(value)), stable)


def _det(matrix: list[list]) -> object:
    """Determinant by Gaussian elimination with partial pivoting.

    Works for floats and for ``Fraction`` entries (exact then).
    """
    a = [row[:] for row in matrix]
    size = len(a)
    det = 1
    for col in range(size):
        piv = max(range(col, size), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return a[piv][col] * 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pivot = a[col][col]
        det = det * pivot
        for r in range(col + 1, size):
            factor = a[r][col] / pivot
            if factor:
                row_r, row_c = a[r], a[col]
                for c in range(col + 1, size):
                    row_r[c] -= factor * row_c[c]
    return det


def hankel_det(s, i: int, j: int):
    """Determinant of the ``j x j`` Hankel matrix ``[s[i + r + c]]``.

    ``s`` may be a :class:`RealSequence` (float result) or a plain sequence
    of fractions (exact result). Indices are positions into ``s``.
    """
    terms = s.values.tolist() if isinstance(s, RealSequence) else list(s)
    if i < 0 or j < 1:
        raise IndexError("need i >= 0 and j >= 1")
    if i + 2 * j - 2 >= len(terms):
        raise IndexError(f"H_{j}^{i} needs index {i + 2 * j - 2}, sequence has {len(terms)} terms")
    return _det([[terms[i + r + c] for c in range(j)] for r in range(j)])


def hankel_ratios(series: RecurrentSeries, m: int) -> tuple[RealSequence, tuple[int, ...]]:
    """Quotients ``H_m^{k+1} / H_m^k`` and the indices ``k`` skipped as singular.

    The returned sequence carries offset ``k`` of its first entry.
    """
    if not 1 <= m <= series.source.degree:
        raise ValueError(f"m must lie in 1..{series.source.degree}")
    terms = _exact_terms(series)
    count = len(terms) - 2 * m + 2  # number of H_m^k available
    dets = [hankel_det(terms, k, m) for k in range(count)]
    ratios, skipped, first = [], [], None
    for k in range(count - 1):
        if dets[k] == 0:
            skipped.append(k)
            continue
        if first is None:
            first = k
        ratios.append(float(Fraction(dets[k + 1]) / Fraction(dets[k])))
    if len(ratios) < 3:
        raise NonConvergenceError(
            f"only {len(ratios)} Hankel quotients for m={m}; need 3", [m])
    return RealSequence(ratios, first), tuple(skipped)


def root_products(series: RecurrentSeries, m: int) -> RealSequence:
    """Quotients of consecutive order-``m`` Hankel determinants.

    Under ``|z_m| > |z_{m+1}|`` these converge to ``z_1 z_2 ... z_m``.
    """
    return hankel_ratios(series, m)[0]


def all_roots(p: Polynomial, n: int = 60, accelerate: bool = True) -> list[RootEstimate]:
    """All roots of ``p`` from the limits of the Hankel quotient sequences.

    Requires real roots with distinct moduli. Raises
    :class:`NonConvergenceError` naming every ``m`` whose quotient tail is
    not stable to 10%.
    """
    series = bernoulli_sequence(p, None, n)
    products, failed = [1.0], []
    for m in range(1, p.degree + 1):
        ratios, _ = hankel_ratios(series, m)
        value, stable = _limit_of(ratios.tolist(), accelerate)
        # b0 != 0, so a vanishing root product is an artefact of zero terms
        if not stable or value == 0 or not math.isfinite(value):
            failed.append(m)
        products.append(value)
    if failed:
        raise NonConvergenceError(
            f"Hankel quotients did not settle for m = {failed}", failed)
    estimates = []
    for m in range(1, p.degree + 1):
        z = products[m] / products[m - 1]
        estimates.append(RootEstimate(z, m, abs(p(z))))
    estimates.sort(key=lambda r: -abs(r.value))
    return estimates


def smallest_root_bernoulli(a: Sequence[float], n: int = 40,
                            accelerate: bool = False) -> RootEstimate:
    """Smallest-modulus solution of ``1 = a_1 x + ... + a_p x**p``.

    Runs ``u_{k+p} = a_1 u_{k+p-1} + ... + a_p u_k`` from ``(0, ..., 0, 1)``
    and returns the last ratio ``u_k / u_{k+1}``.
    """
    if not a or a[-1] == 0:
        raise ValueError("need a nonempty coefficient list with a_p != 0")
    p = len(a)
    coeffs = [Fraction(float(c)) for c in a]
    u = [Fraction(0)] * (p - 1) + [Fraction(1)]
    while len(u) <= max(n, p + 4):
        u.append(sum(coeffs[j] * u[-1 - j] for j in range(p)))
    if u[-1] == 0:
        raise ZeroDivisionError("trailing series term is zero")
    start = max((k + 1 for k in range(1, len(u)) if u[k] == 0), default=0)
    ratios = [float(u[k] / u[k + 1]) for k in range(start, len(u) - 1)]
    value, stable = _limit_of(ratios, accelerate)
    residual = abs(1.0 - sum(c * value ** (j + 1) for j, c in enumerate(a)))
    return RootEstimate(value, p, residual, stable)
