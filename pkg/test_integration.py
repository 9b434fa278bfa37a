#!/usr/bin/env python3
"""Integration test to verify the pfrkit modules work together end to end."""

import sys
from fractions import Fraction
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from pfrkit.core.config import Config, FittingConfig, MonteCarloConfig, TransferConfig
from pfrkit.modules.groups import AmbientGroup, FiniteSet
from pfrkit.modules.instances import make_ap, make_gap, make_lovett_regev, make_random_convex_instance, search_radius
from pfrkit.modules.progressions import Frame, gaussian_correlation, gaussian_density
from pfrkit.modules.setops import doubling_constant, greedy_cover, sumset, verify_cover
from pfrkit.modules.transfer import transfer_pipeline


def quick_config(**transfer) -> Config:
    return Config(
        monte_carlo=MonteCarloConfig(samples=20_000, seed=1),
        fitting=FittingConfig(samples_per_dim=400),
        transfer=TransferConfig(**transfer),
    )


def test_small_doubling():
    """Test sumsets and doubling on generated progressions."""
    print("Testing small doubling...")

    a_set, p, x_set = make_ap(5)
    assert doubling_constant(a_set) == Fraction(9, 5), "AP of length 5 has K = 9/5"
    print("✓ Arithmetic progression K = 9/5")

    a_set, _, _ = make_gap(Frame.of(AmbientGroup(1), [0], [[1], [100]]), (3, 3))
    assert len(sumset(a_set, a_set)) == 25, "Proper 3x3 GAP doubles to 5x5"
    print(f"✓ Proper GAP: |A+A| = 25, K = {doubling_constant(a_set)}")

    print("Small doubling: PASSED\n")


def test_covers():
    """Test exact cover verification and the greedy cover."""
    print("Testing covers...")

    a_set, p, x_set = make_ap(9)
    assert verify_cover(a_set, p, x_set).ok, "Generated instance must be covered"
    print("✓ Generated AP instance is covered")

    far = FiniteSet.of(AmbientGroup(1), [[k * 20] for k in range(6)])
    x_greedy = greedy_cover(far, p)
    assert verify_cover(far, p, x_greedy).ok, "Greedy cover must cover"
    print(f"✓ Greedy cover uses {len(x_greedy)} translates for {len(far)} spread points")

    print("Covers: PASSED\n")


def test_transfer_ap():
    """Test the convex-to-ellipsoid transfer on an AP."""
    print("Testing transfer on an AP...")

    a_set, p, x_set = make_ap(9)
    report = transfer_pipeline(a_set, p, x_set, quick_config())
    assert report.verified, f"Transfer failed: {report.failures}"
    print(f"✓ Surrogate {report.surrogate_source.value}: |Y| = {report.counts['Y']}, |Z| = {report.counts['Z']}")
    print(f"✓ |X'| = {report.counts['X_prime']} <= |X||Y|")

    print("Transfer on AP: PASSED\n")


def test_transfer_polytopes():
    """Test the transfer on random polytope progressions, ellipsoid and skew targets."""
    print("Testing transfer on random polytopes...")

    for seed in (1, 2, 3):
        a_set, p, x_set = make_random_convex_instance(2, 4, seed=seed)
        report = transfer_pipeline(a_set, p, x_set, quick_config())
        assert report.verified, f"Seed {seed} failed: {report.failures}"
        bounds = ", ".join(f"{k}: {v.lhs} <= {v.rhs.value:.2f}" for k, v in report.covering_bounds.items())
        print(f"✓ Seed {seed}: |C| = {report.counts['C']}, {bounds}")

    a_set, p, x_set = make_random_convex_instance(3, 5, seed=2)
    report = transfer_pipeline(a_set, p, x_set, quick_config(target="skew", check_volume_bounds=False))
    assert report.verified, f"Skew transfer failed: {report.failures}"
    print(f"✓ Skew surrogate in d=3: |Y| = {report.counts['Y']}, |Z| = {report.counts['Z']}")

    print("Transfer on polytopes: PASSED\n")


def test_lovett_regev():
    """Test the ball-in-lattice family through transfer and Gaussian correlation."""
    print("Testing Lovett-Regev instances...")

    radius = search_radius(3, seed=1)
    a_set, p = make_lovett_regev(3, radius, seed=1)
    assert 50 <= len(a_set) <= 500, "Radius search must land in the window"
    print(f"✓ R = {radius}: |A| = {len(a_set)}, K = {float(doubling_constant(a_set)):.3f}")

    x_set = FiniteSet.of(a_set.group, [a_set.group.zero()])
    report = transfer_pipeline(a_set, p, x_set, quick_config(check_volume_bounds=False))
    assert report.verified, f"Transfer failed: {report.failures}"
    print(f"✓ Transfer verified with {report.surrogate_source.value} surrogate")

    plane_set, plane = make_lovett_regev(2, search_radius(2, seed=1), seed=1)
    theta = gaussian_density(plane.frame, plane.body.gram)
    rho = gaussian_correlation(plane_set, theta)
    assert 0 < rho <= 1, "Correlation is a cosine"
    print(f"✓ Gaussian correlation rho = {rho:.4f} ({len(theta.weights)} support points)")

    print("Lovett-Regev: PASSED\n")


def main():
    """Run all integration tests."""
    print("=" * 60)
    print("pfrkit Integration Test Suite")
    print("=" * 60)
    print()

    try:
        test_small_doubling()
        test_covers()
        test_transfer_ap()
        test_transfer_polytopes()
        test_lovett_regev()

        print("=" * 60)
        print("ALL TESTS PASSED! ✓")
        print("=" * 60)
        print()
        print("Run: python pfr.py --help")

    except Exception as e:
        print(f"\n✗ TEST FAILED: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
