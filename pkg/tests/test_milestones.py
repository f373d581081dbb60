"""Milestone construction, transformation, and codec tests.

The literal example sets for n=16 are frozen from the source construction:
the doubling base {1,2,4,8,16}, one midpoint pass {1,2,3,4,6,8,12,16}, one
deletion pass {1,4,16}, and the exact regime 1..16.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabspan.milestones import (MilestoneSet, approximation_bound, code_length,
                                 index_of, milestone_at, milestone_set,
                                 next_pow2, transform, transform_index,
                                 valid_k_range)


def expected_cardinality(n: int, k: int) -> int:
    """Closed forms for power-of-two n, ceiling-corrected for k < 0."""
    lg = int(math.log2(n))
    if k >= 0:
        return 2**k * (lg - k + 1)
    return math.ceil(lg / 2**(-k)) + 1


class TestLiteralSets:
    def test_base_16(self):
        assert milestone_set(16, 0).milestones == (1, 2, 4, 8, 16)

    def test_densified_16(self):
        assert milestone_set(16, 1).milestones == (1, 2, 3, 4, 6, 8, 12, 16)

    def test_coarsened_16(self):
        assert milestone_set(16, -1).milestones == (1, 4, 16)

    def test_exact_16(self):
        assert milestone_set(16, 3).milestones == tuple(range(1, 17))

    def test_two_passes_16(self):
        # One midpoint pass applied to the k=1 set, cross-checked against the
        # closed form 2^2 * (4 - 2 + 1) = 12.
        ms = milestone_set(16, 2)
        assert ms.milestones == (1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 16)
        assert len(ms) == expected_cardinality(16, 2) == 12

    def test_coarsest_16(self):
        assert milestone_set(16, -2).milestones == (1, 16)


class TestCardinalities:
    @pytest.mark.parametrize("n", [4, 8, 16, 32, 64, 128, 256, 512, 1024])
    def test_formula_all_k(self, n):
        lo, hi = valid_k_range(n)
        for k in range(lo, hi + 1):
            assert len(milestone_set(n, k)) == expected_cardinality(n, k), (n, k)

    def test_exact_regime_has_all_integers(self):
        for n in (4, 8, 16, 32):
            lg = int(math.log2(n))
            assert milestone_set(n, lg - 1).milestones == tuple(range(1, n + 1))

    def test_non_power_of_two_extends_to_l(self):
        ms = milestone_set(20, 0)
        assert ms.L == 32
        assert ms.milestones == (1, 2, 4, 8, 16, 32)


class TestTransform:
    def test_rounds_three_up_to_four(self):
        assert transform(3, milestone_set(16, 0)) == 4

    def test_keeps_two(self):
        assert transform(2, milestone_set(16, 0)) == 2

    def test_one_is_always_a_milestone(self):
        for n in (4, 16, 64):
            lo, hi = valid_k_range(n)
            for k in range(lo, hi + 1):
                assert transform(1, milestone_set(n, k)) == 1

    def test_lookup_in_k1_set(self):
        assert transform(5, milestone_set(16, 1)) == 6

    def test_out_of_range(self):
        ms = milestone_set(16, 0)
        with pytest.raises(ValueError):
            transform(0, ms)
        with pytest.raises(ValueError):
            transform(17, ms)

    @given(st.integers(min_value=2, max_value=300), st.data())
    @settings(max_examples=120)
    def test_properties(self, n, data):
        lo, hi = valid_k_range(n)
        k = data.draw(st.integers(min_value=lo, max_value=hi))
        ms = milestone_set(n, k)
        w = data.draw(st.integers(min_value=1, max_value=ms.L))
        t = transform(w, ms)
        assert t >= w
        assert transform(t, ms) == t  # idempotent
        assert t <= approximation_bound(k, n) * w
        w2 = data.draw(st.integers(min_value=w, max_value=ms.L))
        assert transform(w2, ms) >= t  # monotone


class TestBounds:
    def test_doubling_at_k0(self):
        assert approximation_bound(0, 16) == 2

    def test_intermediate(self):
        assert approximation_bound(2, 16) == Fraction(5, 4)

    def test_negative(self):
        assert approximation_bound(-1, 16) == 4
        assert approximation_bound(-2, 16) == 16

    def test_exact_regime(self):
        assert approximation_bound(3, 16) == 1

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            approximation_bound(4, 16)
        with pytest.raises(ValueError):
            milestone_set(16, -3)

    @pytest.mark.parametrize("n", [4, 8, 16, 32, 64, 128])
    def test_rounding_cost_within_bound(self, n):
        # The cost of a gap (a, b) is b/(a+1): the worst value rounded across
        # it.  (The literal ratio b/a is 2 at the gap (1, 2), which never
        # rounds anything, even when the regime is exact.)
        lo, hi = valid_k_range(n)
        for k in range(lo, hi + 1):
            ms = milestone_set(n, k)
            bound = approximation_bound(k, n)
            for a, b in zip(ms.milestones, ms.milestones[1:]):
                if b - a >= 2:
                    assert Fraction(b, a + 1) <= bound, (n, k, a, b)

    @pytest.mark.parametrize("n", [4, 8, 16, 32, 64])
    def test_nesting(self, n):
        lo, hi = valid_k_range(n)
        for k in range(lo, hi):
            small = set(milestone_set(n, k).milestones)
            big = set(milestone_set(n, k + 1).milestones)
            assert small <= big, (n, k)


class TestCodec:
    def test_code_length_goldens(self):
        assert code_length(milestone_set(16, 0)) == 3   # 5 milestones
        assert code_length(milestone_set(16, 3)) == 4   # 16 milestones
        assert code_length(milestone_set(1024, 0)) == 4  # 11 milestones

    def test_index_of_golden(self):
        assert index_of(8, milestone_set(16, 0)) == 3

    def test_milestone_at_zero(self):
        for n in (4, 16, 128):
            lo, hi = valid_k_range(n)
            for k in range(lo, hi + 1):
                assert milestone_at(0, milestone_set(n, k)) == 1

    @pytest.mark.parametrize("n,k", [(16, 0), (16, 2), (64, -1), (1024, 3)])
    def test_round_trip_every_milestone(self, n, k):
        ms = milestone_set(n, k)
        for i, w in enumerate(ms.milestones):
            assert index_of(w, ms) == i
            assert milestone_at(i, ms) == w
            assert transform_index(w, ms) == i
        assert all(index_of(w, ms) < 2**code_length(ms) for w in ms.milestones)

    def test_index_of_rejects_non_milestone(self):
        with pytest.raises(ValueError):
            index_of(3, milestone_set(16, 0))
        with pytest.raises(ValueError):
            milestone_at(5, milestone_set(16, 0))

    def test_next_pow2(self):
        assert [next_pow2(i) for i in (1, 2, 3, 4, 5, 16, 17)] == [1, 2, 4, 4, 8, 16, 32]


class TestWideWeights:
    # Weights above n are accepted through the widening switch: the top
    # milestone and the index width grow to cover them.
    def test_widened_set_covers_polynomial_weights(self):
        ms = milestone_set(8, 0, max_weight=8**3)
        assert ms.L == 512
        assert transform(300, ms) == 512
        assert code_length(ms) == 4  # 10 milestones
        with pytest.raises(ValueError):
            transform(300, milestone_set(8, 0))

    def test_widened_range_and_bound(self):
        lo, hi = valid_k_range(8, max_weight=512)
        assert (lo, hi) == (-3, 8)
        assert approximation_bound(hi, 8, max_weight=512) == 1
