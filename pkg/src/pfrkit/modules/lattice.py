"""Exact enumeration of integer points in center-shifted symmetric bodies."""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

from loguru import logger

from ..core.errors import DomainError, TruncationError
from ..utils import rational as rq
from ..utils.rational import RationalLike, Vector
from .bodies import SymmetricBody, bounding_box

DEFAULT_LIMIT = 10_000_000

IntVector = Tuple[int, ...]


class _LimitReached(Exception):
    pass


@dataclass(frozen=True)
class LatticePointSet:
    """Integer points n with gauge_body(n - center) <= 1, sorted lexicographically."""
    points: Tuple[IntVector, ...]
    body: SymmetricBody
    center: Vector
    truncated: bool = False

    @property
    def count(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "count": self.count,
            "truncated": self.truncated,
        }


def _fincke_pohst(body: SymmetricBody, center: Vector, limit: int, out: List[IntVector]) -> None:
    """Depth-first enumeration over the exact LDL^T of the (index-reversed) Gram matrix.

    Reversing the index order makes the outermost loop run over the first
    coordinate, so points come out in lexicographic order.
    """
    d = body.dim
    g = body.gram
    rev = tuple(tuple(g[d - 1 - i][d - 1 - j] for j in range(d)) for i in range(d))
    lower, pivots = rq.ldl(rev)
    c = [center[d - 1 - i] for i in range(d)]
    x = [0] * d

    def descend(k: int, budget: Fraction) -> None:
        mu = c[k] - sum((lower[i][k] * (x[i] - c[i]) for i in range(k + 1, d)), Fraction(0))
        radius = rq.sqrt_upper(budget / pivots[k])
        for v in range(math.ceil(mu - radius), math.floor(mu + radius) + 1):
            term = pivots[k] * (v - mu) ** 2
            if term > budget:
                continue
            x[k] = v
            if k == 0:
                if len(out) == limit:
                    raise _LimitReached
                out.append(tuple(x[d - 1 - i] for i in range(d)))
            else:
                descend(k - 1, budget - term)

    descend(d - 1, Fraction(1))


def _box_scan(body: SymmetricBody, center: Vector, limit: int, out: List[IntVector]) -> None:
    radii = bounding_box(body)
    ranges = [
        range(math.ceil(ci - ri), math.floor(ci + ri) + 1) for ci, ri in zip(center, radii)
    ]
    for n in product(*ranges):
        if body.gauge_key([v - ci for v, ci in zip(n, center)]) <= 1:
            if len(out) == limit:
                raise _LimitReached
            out.append(tuple(n))


def enumerate_lattice(
    body: SymmetricBody,
    center: Optional[Sequence[RationalLike]] = None,
    limit: int = DEFAULT_LIMIT,
    method: str = "auto",
) -> LatticePointSet:
    """Enumerate Z^d inside center + body.

    Args:
        body: Symmetric body in coefficient space.
        center: Rational shift c (membership is tested on n - c). Defaults to 0.
        limit: Maximum number of points to return.
        method: "auto" (Fincke-Pohst for ellipsoids, box scan for polytopes),
            "fincke_pohst" or "box_scan".

    Returns:
        The sorted point set. If the limit was hit, ``truncated`` is set and
        ``points`` is the lexicographic prefix of length ``limit``.
    """
    if limit < 1:
        raise DomainError(f"Enumeration limit must be >= 1, got {limit}")
    c = rq.vector(center) if center is not None else tuple(Fraction(0) for _ in range(body.dim))
    rq.check_dim(c, body.dim, "center")

    if method == "auto":
        method = "fincke_pohst" if body.is_ellipsoid else "box_scan"
    if method == "fincke_pohst" and not body.is_ellipsoid:
        raise DomainError("Fincke-Pohst enumeration needs an ellipsoid body")
    if method not in ("fincke_pohst", "box_scan"):
        raise DomainError(f"Unknown enumeration method: {method}")

    points: List[IntVector] = []
    truncated = False
    try:
        if method == "fincke_pohst":
            _fincke_pohst(body, c, limit, points)
        else:
            _box_scan(body, c, limit, points)
    except _LimitReached:
        truncated = True
        logger.error(f"Lattice enumeration truncated at {limit} points (d={body.dim}, {method})")

    points.sort()
    logger.debug(f"Enumerated {len(points)} lattice points via {method}")
    return LatticePointSet(tuple(points), body, c, truncated)


def count_lattice(
    body: SymmetricBody,
    center: Optional[Sequence[RationalLike]] = None,
    limit: int = DEFAULT_LIMIT,
) -> int:
    """Number of integer points in center + body.

    Raises:
        TruncationError: If more than ``limit`` points exist.
    """
    result = enumerate_lattice(body, center, limit)
    if result.truncated:
        raise TruncationError(
            f"More than {limit} lattice points; raise the limit", partial=result, limit=limit
        )
    return result.count
