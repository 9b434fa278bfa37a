"""pfrkit - executable convex and ellipsoid progressions, lattice counts and the convex-to-ellipsoid transfer."""

__version__ = "0.1.0"
