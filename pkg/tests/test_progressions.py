"""Tests for frames, progressions, images and Gaussian densities."""

import math
from fractions import Fraction
from itertools import product

import pytest

from pfrkit.core.errors import DimensionMismatchError, DomainError, TruncationError
from pfrkit.modules.bodies import SymmetricBody
from pfrkit.modules.groups import AmbientGroup, CoordinateKind, FiniteSet
from pfrkit.modules.progressions import (
    Frame,
    Progression,
    ProgressionKind,
    ev,
    gap_to_convex,
    gaussian_correlation,
    gaussian_density,
    image_set,
    progression_size,
)

Z1 = AmbientGroup(1)


def frame_1d(*gens, a0=0):
    return Frame.of(Z1, [a0], [[g] for g in gens])


def theta_sum(a, cutoff=40):
    return math.fsum(math.exp(-a * n * n) for n in range(-cutoff, cutoff + 1))


class TestFrame:
    def test_ev(self):
        assert ev(frame_1d(1, 10), [3, 2]) == (Fraction(23),)

    @pytest.mark.parametrize("n, k", [((1, 2), (3, -1)), ((0, 0), (5, 5)), ((-2, 7), (2, -7))])
    def test_ev_is_affine(self, n, k):
        frame = Frame.of(AmbientGroup(2), [3, -1], [[1, 2], [0, 5]])
        lhs = tuple(x + y - z for x, y, z in zip(ev(frame, n), ev(frame, k), frame.a0))
        assert lhs == ev(frame, [a + b for a, b in zip(n, k)])

    def test_integer_group_rejects_rational_generator(self):
        with pytest.raises(DomainError):
            Frame.of(Z1, [0], [["1/2"]])

    def test_rational_group_accepts_it(self):
        frame = Frame.of(AmbientGroup(1, CoordinateKind.RATIONAL), [0], [["1/2"]])
        assert ev(frame, [3]) == (Fraction(3, 2),)


class TestGap:
    @pytest.mark.parametrize("lengths, expected", [
        ((3,), [(0,), (1,), (2,)]),
        ((2,), [(0,), (1,)]),
        ((1,), [(0,)]),
    ])
    def test_lattice_points(self, lengths, expected):
        p = gap_to_convex(lengths, Frame.standard(1))
        assert list(p.lattice_points().points) == expected

    @pytest.mark.parametrize("lengths", [
        n for d in (1, 2) for n in product(range(1, 5), repeat=d)
    ] + [(1, 2, 3), (2, 2, 2)])
    def test_roundtrip(self, lengths):
        p = gap_to_convex(lengths, Frame.standard(len(lengths)))
        assert list(p.lattice_points().points) == list(product(*(range(n) for n in lengths)))
        assert p.gap_lengths == tuple(lengths)

    def test_rejects_zero_length(self):
        with pytest.raises(DomainError):
            gap_to_convex((0,), Frame.standard(1))

    def test_rejects_bad_box(self):
        with pytest.raises(DomainError):
            Progression(Frame.standard(1), SymmetricBody.box([1]), (Fraction(0),), ProgressionKind.GAP)


class TestValidation:
    def test_ellipsoid_kind_needs_ellipsoid(self, unit_square):
        with pytest.raises(DomainError):
            Progression(Frame.standard(2), unit_square, (Fraction(0),) * 2, ProgressionKind.ELLIPSOID)

    def test_skew_needs_d_forms(self):
        body = SymmetricBody.polytope([[1, 0], [0, 1], [1, 1]])
        with pytest.raises(DomainError):
            Progression(Frame.standard(2), body, (Fraction(0),) * 2, ProgressionKind.SKEW)

    def test_rank_mismatch(self, unit_disk):
        with pytest.raises(DimensionMismatchError):
            Progression(Frame.standard(3), unit_disk, (Fraction(0),) * 2, ProgressionKind.ELLIPSOID)


class TestImage:
    def test_size_of_gap(self):
        assert progression_size(gap_to_convex((3,), Frame.standard(1))) == 3

    def test_size_of_disk(self, unit_disk):
        p = Progression(Frame.standard(2), unit_disk, (Fraction(0),) * 2, ProgressionKind.ELLIPSOID)
        assert progression_size(p) == 5

    def test_proper_gap(self):
        report = image_set(gap_to_convex((2, 2), frame_1d(1, 10)))
        assert [a[0] for a in report.set] == [0, 1, 10, 11]
        assert not report.improper

    def test_improper_gap(self):
        report = image_set(gap_to_convex((2, 2), frame_1d(1, 1)))
        assert (report.size, report.cardinality) == (4, 3)
        assert report.improper

    def test_spread_generators_keep_disk_proper(self, unit_disk):
        p = Progression(frame_1d(1, 10 ** 6), unit_disk, (Fraction(0),) * 2, ProgressionKind.ELLIPSOID)
        assert image_set(p).cardinality == 5

    def test_truncation(self):
        with pytest.raises(TruncationError):
            image_set(gap_to_convex((10,), Frame.standard(1)), limit=5)


class TestGaussian:
    def test_one_dimensional_values(self):
        theta = gaussian_density(Frame.standard(1), [[1]], tail_eps=1e-12)
        assert theta[[0]] == pytest.approx(1.0)
        assert theta[[1]] == pytest.approx(math.exp(-1))
        assert theta[[-2]] == pytest.approx(math.exp(-4))
        assert theta.total_mass == pytest.approx(theta_sum(1), abs=1e-10)
        assert theta.total_dropped <= 1e-12 * (1 + 1e-9)

    def test_collapsing_frame(self):
        theta = gaussian_density(frame_1d(1, 1), [[1, 0], [0, 1]])
        expected = math.fsum(math.exp(-2 * k * k) for k in range(-30, 31))
        assert theta[[0]] == pytest.approx(expected, abs=1e-10)

    def test_diagonal_gram_factorizes(self):
        theta = gaussian_density(Frame.standard(2), [[1, 0], [0, 2]])
        assert theta.total_mass == pytest.approx(theta_sum(1) * theta_sum(2), abs=1e-10)

    def test_correlation_of_origin(self):
        theta = gaussian_density(Frame.standard(1), [[1]])
        rho = gaussian_correlation(FiniteSet.of(Z1, [[0]]), theta)
        assert rho == pytest.approx(1 / math.sqrt(theta_sum(2)), rel=1e-9)

    def test_correlation_outside_support_is_zero(self):
        theta = gaussian_density(Frame.standard(1), [[1]])
        assert gaussian_correlation(FiniteSet.of(Z1, [[1000]]), theta) == 0.0

    def test_correlation_is_at_most_one(self):
        theta = gaussian_density(Frame.standard(1), [["1/10"]])
        support = FiniteSet.of(Z1, list(theta.weights))
        assert 0 < gaussian_correlation(support, theta) <= 1

    def test_translation_invariance(self):
        a_set = FiniteSet.of(Z1, [[k] for k in range(-3, 4)])
        base = gaussian_correlation(a_set, gaussian_density(frame_1d(2, 3), [["1/2", 0], [0, "1/3"]]))
        moved = gaussian_correlation(
            a_set.translate([17]), gaussian_density(frame_1d(2, 3, a0=17), [["1/2", 0], [0, "1/3"]])
        )
        assert moved == pytest.approx(base, rel=1e-12)

    def test_empty_set(self):
        theta = gaussian_density(Frame.standard(1), [[1]])
        with pytest.raises(DomainError):
            gaussian_correlation(FiniteSet.empty(Z1), theta)
