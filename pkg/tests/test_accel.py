import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ratiter.accel import (
    RealSequence,
    SequenceTooShortError,
    acceleration_report,
    aitken_delta2,
    forward_difference,
    iterated_aitken,
)

from conftest import cos_oracle

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def exact_delta2(s):
    s = [Fraction(v) for v in s]
    return [(s[i] * s[i + 2] - s[i + 1] ** 2) / (s[i] - 2 * s[i + 1] + s[i + 2])
            for i in range(len(s) - 2)]


class TestRealSequence:
    def test_rejects_nonfinite_and_empty(self):
        with pytest.raises(ValueError):
            RealSequence([1.0, math.nan])
        with pytest.raises(ValueError):
            RealSequence([math.inf])
        with pytest.raises(ValueError):
            RealSequence([])

    def test_immutable(self):
        s = RealSequence([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 3.0

    def test_slice_keeps_index(self):
        s = RealSequence([1, 2, 3, 4], offset=5)
        assert s[2:] == RealSequence([3, 4], offset=7)


class TestForwardDifference:
    @pytest.mark.parametrize("values, k, expected", [
        ((1, 2, 4, 8), 1, (1, 2, 4)),
        ((7.5, 7.5, 7.5), 2, (0,)),
        ((0, 1, 4, 9), 2, (2, 2)),
    ])
    def test_examples(self, values, k, expected):
        assert forward_difference(RealSequence(values), k).tolist() == list(expected)

    def test_offset_preserved(self):
        assert forward_difference(RealSequence([1, 2, 4], offset=3)).offset == 3

    def test_too_short(self):
        with pytest.raises(SequenceTooShortError):
            forward_difference(RealSequence([1, 2]), 2)

    @given(st.lists(finite, min_size=3, max_size=20))
    def test_second_difference_is_iterated_first(self, vals):
        s = RealSequence(vals)
        assert forward_difference(s, 2) == forward_difference(forward_difference(s, 1), 1)


class TestAitken:
    def test_geometric_exact(self):
        res = aitken_delta2(RealSequence([3, 2, 1.5]))
        assert res.transformed.tolist() == [1.0]
        assert res.degenerate_indices == ()

    def test_constant_falls_back(self):
        res = aitken_delta2(RealSequence([2.5, 2.5, 2.5]))
        assert res.transformed.tolist() == [2.5]
        assert res.degenerate_indices == (0,)

    def test_too_short(self):
        with pytest.raises(SequenceTooShortError):
            aitken_delta2(RealSequence([1.0, 2.0]))

    def test_cos_iterates_move_closer(self, cos_limit):
        xs = [0.5]
        for _ in range(4):
            xs.append(math.cos(xs[-1]))
        res = aitken_delta2(RealSequence(xs))
        for n, t in enumerate(res.transformed):
            assert abs(t - cos_limit) < abs(xs[n + 2] - cos_limit)

    @given(st.lists(finite, min_size=3, max_size=12))
    def test_matches_exact_formula(self, vals):
        res = aitken_delta2(RealSequence(vals))
        for n, t in enumerate(res.transformed):
            if n in res.degenerate_indices:
                assert t == vals[n + 2]
                continue
            ref = float(exact_delta2(vals[n:n + 3])[0])
            scale = abs(vals[n]) + abs(vals[n + 1]) + abs(vals[n + 2]) + 1
            denom = abs(vals[n] - 2 * vals[n + 1] + vals[n + 2])
            # forward error bound of the extrapolation formula
            assert abs(t - ref) <= 1e-13 * scale * (1 + scale / denom)

    @given(L=st.floats(-10, 10), C=st.floats(0.1, 10), sign=st.sampled_from([-1, 1]),
           r=st.floats(-0.95, 0.95))
    def test_exact_on_geometric_error(self, L, C, sign, r):
        assume(abs(r) > 1e-3 and abs(L) > 0.5)
        s = RealSequence([L + sign * C * r ** n for n in range(8)])
        for t in aitken_delta2(s).transformed:
            assert t == pytest.approx(L, rel=1e-12)

    @given(vals=st.lists(st.floats(-10, 10), min_size=3, max_size=10),
           alpha=st.floats(0.1, 10), sign=st.sampled_from([-1, 1]), beta=st.floats(-10, 10))
    def test_quasi_linear(self, vals, alpha, sign, beta):
        alpha *= sign
        s = RealSequence(vals)
        base = aitken_delta2(s)
        assume(not base.degenerate_indices)
        v = np.array(vals)
        d2 = np.abs(v[:-2] - 2 * v[1:-1] + v[2:])
        assume(np.all(d2 > 1e-3 * (np.abs(v[:-2]) + np.abs(v[1:-1]) + np.abs(v[2:]) + 1)))
        mapped = aitken_delta2(RealSequence(alpha * v + beta))
        assume(not mapped.degenerate_indices)
        expected = alpha * base.transformed.values + beta
        scale = abs(alpha) * np.max(np.abs(v)) + abs(beta) + 1
        assert np.all(np.abs(mapped.transformed.values - expected) <= 1e-12 * scale / 1e-3)

    @given(st.lists(finite, min_size=4, max_size=15), st.integers(1, 5))
    def test_shift_consistency(self, vals, k):
        assume(len(vals) - k >= 3)
        s = RealSequence(vals)
        whole = aitken_delta2(s).transformed
        part = aitken_delta2(s[k:]).transformed
        assert part == whole[k:]


class TestIteratedAitken:
    def test_depth_zero_is_identity(self):
        s = RealSequence([1, 2, 3])
        assert iterated_aitken(s, 0) == [s]

    def test_exactness_propagates(self):
        s = RealSequence([2.0 + 3.0 * 0.6 ** n for n in range(7)])
        rows = iterated_aitken(s, 2)
        assert [len(r) for r in rows] == [7, 5, 3]
        for row in rows[1:]:
            assert np.allclose(row.values, 2.0, rtol=1e-12, atol=0)

    def test_alternating_harmonic(self):
        # exact rational oracle for the depth-2 endpoint of 9 partial sums
        sums = [sum(Fraction((-1) ** n, n + 1) for n in range(k + 1)) for k in range(9)]
        row2_end = float(exact_delta2(exact_delta2(sums))[-1])
        assert row2_end - math.log(2) == pytest.approx(3.648e-6, rel=1e-3)

        rows = iterated_aitken(RealSequence([float(v) for v in sums]), 2)
        assert rows[2].last == pytest.approx(row2_end, abs=1e-13)
        assert abs(rows[2].last - math.log(2)) < abs(rows[1].last - math.log(2)) / 50

    def test_too_short(self):
        with pytest.raises(SequenceTooShortError):
            iterated_aitken(RealSequence([1, 2, 3, 4]), 2)


class TestAccelerationReport:
    def test_geometric(self):
        rep = acceleration_report(RealSequence([1.5, 1.25, 1.125]), 1.0)
        assert rep.errors.tolist() == [0.5, 0.25, 0.125]
        assert rep.ratios.tolist() == [0.5, 0.5]
        assert rep.estimated_order == pytest.approx(1.0)

    def test_already_converged(self):
        rep = acceleration_report(RealSequence([2.0, 2.0, 2.0]), 2.0)
        assert rep.errors.tolist() == [0, 0, 0]
        assert len(rep.ratios) == 0
        assert math.isnan(rep.estimated_order)

    def test_linear_rate_of_plain_iteration(self, cos_limit):
        xs = [0.5]
        for _ in range(40):
            xs.append(math.cos(xs[-1]))
        rep = acceleration_report(RealSequence(xs), cos_limit)
        assert rep.estimated_order == pytest.approx(1.0, abs=0.05)
        assert rep.ratios.last == pytest.approx(math.sin(cos_limit), rel=1e-3)
