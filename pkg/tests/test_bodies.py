"""Tests for symmetric bodies: gauges, support, volumes and Minkowski sums."""

import math
from fractions import Fraction

import pytest

from pfrkit.core.errors import (
    DimensionMismatchError,
    DomainError,
    NotPositiveDefiniteError,
    RankDeficientError,
    SamplingError,
)
from pfrkit.modules.bodies import (
    Ordering,
    SymmetricBody,
    VolumeEstimate,
    VolumeMethod,
    bounding_box,
    gauge_compare,
    minkowski_member,
    minkowski_volume_mc,
    scale_body,
    support_point,
    volume,
)


class TestConstruction:
    def test_rejects_indefinite_gram(self):
        with pytest.raises(NotPositiveDefiniteError):
            SymmetricBody.ellipsoid([[1, 2], [2, 1]])

    def test_rejects_unbounded_polytope(self):
        with pytest.raises(RankDeficientError):
            SymmetricBody.polytope([[1, 1]])

    def test_box_encodes_radii(self):
        body = SymmetricBody.box(["3/2", 2])
        assert body.axis_radii == (Fraction(3, 2), Fraction(2))

    def test_zero_radius_box_is_half_width(self):
        body = SymmetricBody.box([0])
        assert body.contains([Fraction(1, 2)])
        assert not body.contains([Fraction(3, 4)])

    def test_volume_estimate_invariants(self):
        with pytest.raises(DomainError):
            VolumeEstimate(1.0, 0.1, VolumeMethod.EXACT, 0)
        with pytest.raises(DomainError):
            VolumeEstimate(-1.0, 0.0, VolumeMethod.EXACT, 0)


class TestGauge:
    def test_boundary_point_of_disk(self, unit_disk):
        assert gauge_compare(unit_disk, [1, 0]) == Ordering.EQ

    def test_scaled_square(self, unit_square):
        assert gauge_compare(unit_square, [2, 1], 2) == Ordering.EQ

    def test_outside_ellipse(self):
        body = SymmetricBody.ellipsoid([["1/4", 0], [0, 1]])
        assert gauge_compare(body, [3, 0]) == Ordering.GT
        assert gauge_compare(body, [2, 0]) == Ordering.EQ
        assert gauge_compare(body, [1, 0]) == Ordering.LT

    @pytest.mark.parametrize("x", [[1, 2], ["1/3", "-5/7"], [0, 0]])
    def test_symmetry(self, unit_disk, cross_polytope, x):
        neg = [-Fraction(v) for v in x]
        for body in (unit_disk, cross_polytope):
            assert gauge_compare(body, x, "1/2") == gauge_compare(body, neg, "1/2")

    def test_negative_threshold(self, unit_disk):
        with pytest.raises(DomainError):
            gauge_compare(unit_disk, [0, 0], -1)

    def test_wrong_dimension(self, unit_disk):
        with pytest.raises(DimensionMismatchError):
            gauge_compare(unit_disk, [1, 0, 0])


class TestSupport:
    def test_disk(self, unit_disk):
        result = support_point(unit_disk, [0, 1])
        assert result.point == (Fraction(0), Fraction(1))
        assert result.value == 1

    def test_irrational_ellipsoid_support_is_float(self, unit_disk):
        result = support_point(unit_disk, [1, 1])
        assert result.value == pytest.approx(math.sqrt(2))
        assert result.point[0] == pytest.approx(1 / math.sqrt(2))

    def test_box(self):
        body = SymmetricBody.polytope([["1/2", 0], [0, 1]])
        result = support_point(body, [1, 1])
        assert result.point == (Fraction(2), Fraction(1))
        assert result.value == 3

    def test_cross_polytope(self, cross_polytope):
        result = support_point(cross_polytope, [1, 0])
        assert result.point == (Fraction(1), Fraction(0))
        assert result.value == 1

    def test_ties_pick_lexicographically_smallest_vertex(self, unit_square):
        result = support_point(unit_square, [1, 0])
        assert result.point == (Fraction(1), Fraction(-1))
        assert result.value == 1

    def test_zero_direction(self, unit_square):
        with pytest.raises(DomainError):
            support_point(unit_square, [0, 0])


class TestScaleAndBox:
    def test_scale_ellipsoid(self, unit_disk):
        assert scale_body(unit_disk, "1/2").gram == ((4, 0), (0, 4))

    def test_scale_roundtrip(self, cross_polytope):
        assert scale_body(scale_body(cross_polytope, 3), "1/3") == cross_polytope

    def test_scale_rejects_nonpositive(self, unit_disk):
        with pytest.raises(DomainError):
            scale_body(unit_disk, 0)

    def test_bounding_box(self, cross_polytope):
        assert bounding_box(SymmetricBody.ellipsoid([["1/4", 0], [0, 1]])) == (2, 1)
        assert bounding_box(cross_polytope) == (1, 1)


class TestVolume:
    def test_disk(self, unit_disk):
        v = volume(unit_disk)
        assert v.method == VolumeMethod.EXACT
        assert v.value == pytest.approx(math.pi)

    def test_ellipse(self):
        body = SymmetricBody.ellipsoid([["1/4", 0], [0, "1/9"]])
        assert volume(body).value == pytest.approx(6 * math.pi)

    def test_box_and_parallelepiped_are_exact(self, unit_square, cross_polytope):
        assert volume(unit_square).value == 4
        v = volume(cross_polytope)
        assert v.method == VolumeMethod.EXACT
        assert v.value == pytest.approx(2)

    def test_general_polytope_uses_monte_carlo(self):
        # cross-polytope with a redundant third form
        body = SymmetricBody.polytope([[1, 1], [1, -1], ["1/2", 0]])
        v = volume(body, mc_samples=200_000, seed=3)
        assert v.method == VolumeMethod.MONTE_CARLO
        assert abs(v.value - 2) <= 4 * v.std_error

    def test_volume_is_deterministic(self):
        body = SymmetricBody.polytope([[1, 1], [1, -1], ["1/2", 0]])
        assert volume(body, mc_samples=5000, seed=9) == volume(body, mc_samples=5000, seed=9)

    @pytest.mark.parametrize("t", ["1/2", 2, 3])
    def test_scaling_law(self, t):
        body = SymmetricBody.ellipsoid([[2, 1, 0], [1, 2, 0], [0, 0, 1]])
        ratio = volume(scale_body(body, t)).value / volume(body).value
        assert ratio == pytest.approx(float(Fraction(t)) ** 3)


class TestMinkowski:
    @pytest.mark.parametrize("x, expected", [
        ([0, 0], True),
        ([2, 0], True),
        (["2.01", 0], False),
        ([1, 1], True),
    ])
    def test_disk_plus_disk(self, unit_disk, x, expected):
        assert minkowski_member(x, unit_disk, 1, unit_disk, 1) is expected

    @pytest.mark.parametrize("x, expected", [
        ([0, 0], True),
        (["1.99", "1.99"], True),
        (["2.01", 0], False),
    ])
    def test_square_plus_square(self, unit_square, x, expected):
        assert minkowski_member(x, unit_square, 1, unit_square, 1) is expected

    @pytest.mark.parametrize("x, expected", [
        ([2, 0], True),
        (["1.6", "1.6"], True),
        (["1.8", "1.8"], False),
    ])
    def test_square_plus_disk_either_order(self, unit_square, unit_disk, x, expected):
        assert minkowski_member(x, unit_square, 1, unit_disk, 1) is expected
        assert minkowski_member(x, unit_disk, 1, unit_square, 1) is expected

    def test_dimension_mismatch(self, unit_disk):
        with pytest.raises(DimensionMismatchError):
            minkowski_member([0, 0], unit_disk, 1, SymmetricBody.ball(1, 3), 1)

    def test_volume_disk_plus_disk(self, unit_disk):
        v = minkowski_volume_mc(unit_disk, 1, 1, unit_disk, samples=20_000, seed=5)
        assert abs(v.value - 4 * math.pi) <= 4 * v.std_error

    def test_volume_square_plus_disk(self, unit_square, unit_disk):
        v = minkowski_volume_mc(unit_square, 1, 1, unit_disk, samples=20_000, seed=5)
        assert abs(v.value - (12 + math.pi)) <= 4 * v.std_error

    def test_volume_cube_plus_cube(self):
        cube = SymmetricBody.box([1, 1, 1])
        v = minkowski_volume_mc(cube, 1, 1, cube, samples=5000)
        assert v.value == pytest.approx(64)

    def test_too_few_samples(self, unit_disk):
        with pytest.raises(SamplingError):
            minkowski_volume_mc(unit_disk, 1, 1, unit_disk, samples=999)
