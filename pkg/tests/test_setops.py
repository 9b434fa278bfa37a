"""Tests for sumsets, doubling constants and covers."""

from fractions import Fraction

import numpy as np
import pytest

from pfrkit.core.errors import DomainError, GroupMismatchError, TruncationError
from pfrkit.modules.bodies import SymmetricBody
from pfrkit.modules.groups import AmbientGroup, FiniteSet
from pfrkit.modules.progressions import Frame, Progression, ProgressionKind, gap_to_convex, image_set
from pfrkit.modules.setops import doubling_constant, greedy_cover, sumset, verify_cover

Z1 = AmbientGroup(1)
Z2 = AmbientGroup(2)


def ints(*values):
    return FiniteSet.of(Z1, [[v] for v in values])


def random_set(seed, size=15, spread=60):
    rng = np.random.default_rng(seed)
    return ints(*rng.integers(-spread, spread, size=size).tolist())


class TestSumset:
    def test_small(self):
        assert sumset(ints(0, 1), ints(0, 1)) == ints(0, 1, 2)

    def test_square(self):
        square = FiniteSet.of(Z2, [[0, 0], [0, 1], [1, 0], [1, 1]])
        assert len(sumset(square, square)) == 9

    def test_zero_is_identity(self):
        a_set = random_set(1)
        assert sumset(a_set, ints(0)) == a_set

    @pytest.mark.parametrize("seed", range(4))
    def test_commutative_and_associative(self, seed):
        a, b, c = random_set(seed), random_set(seed + 10), random_set(seed + 20, size=5)
        assert sumset(a, b) == sumset(b, a)
        assert sumset(sumset(a, b), c) == sumset(a, sumset(b, c))

    @pytest.mark.parametrize("seed", range(4))
    def test_lower_bound(self, seed):
        a_set = random_set(seed)
        assert len(sumset(a_set, a_set)) >= 2 * len(a_set) - 1

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatchError):
            sumset(ints(0), FiniteSet.of(Z2, [[0, 0]]))

    def test_guard(self):
        with pytest.raises(TruncationError):
            sumset(ints(0, 1), ints(0, 1), guard=3)


class TestDoubling:
    @pytest.mark.parametrize("n", [1, 2, 7, 50])
    def test_arithmetic_progression(self, n):
        assert doubling_constant(ints(*range(n))) == Fraction(2 * n - 1, n)

    def test_example(self):
        assert doubling_constant(ints(0, 1, 3)) == 2

    def test_translation_invariant(self):
        a_set = random_set(5)
        assert doubling_constant(a_set.translate([31])) == doubling_constant(a_set)

    def test_proper_gap(self):
        frame = Frame.of(Z1, [0], [[1], [100], [10_000]])
        a_set = image_set(gap_to_convex((3, 2, 4), frame)).set
        assert len(sumset(a_set, a_set)) == 5 * 3 * 7

    def test_empty(self):
        with pytest.raises(DomainError):
            doubling_constant(FiniteSet.empty(Z1))


class TestCover:
    def setup_method(self):
        self.gap3 = gap_to_convex((3,), Frame.standard(1))

    def test_covered(self):
        assert verify_cover(ints(0, 1, 2), self.gap3, ints(0)).ok

    def test_witness(self):
        result = verify_cover(ints(0, 1, 2, 3), self.gap3, ints(0))
        assert not result.ok
        assert result.witness == (Fraction(3),)
        assert result.to_dict() == {"ok": False, "witness": ["3/1"]}

    def test_two_translates(self):
        assert verify_cover(ints(0, 1, 2, 3), self.gap3, ints(0, 1)).ok

    def test_greedy_single(self):
        assert greedy_cover(ints(7), self.gap3) == ints(6)

    def test_greedy_empty(self):
        assert len(greedy_cover(FiniteSet.empty(Z1), self.gap3)) == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_greedy_always_covers(self, seed):
        a_set = random_set(seed, size=25, spread=200)
        p = Progression(
            Frame.standard(1), SymmetricBody.ellipsoid([["1/16"]]), (Fraction(0),), ProgressionKind.ELLIPSOID
        )
        x_set = greedy_cover(a_set, p)
        assert len(x_set) <= len(a_set)
        assert verify_cover(a_set, p, x_set).ok

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            verify_cover(FiniteSet.of(Z2, [[0, 0]]), self.gap3, FiniteSet.of(Z2, [[0, 0]]))
