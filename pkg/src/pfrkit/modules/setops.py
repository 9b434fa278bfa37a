"""Sumsets, doubling constants and covers A ⊆ P + X."""

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional

from loguru import logger

from ..core.errors import DomainError, TruncationError
from ..utils import rational as rq
from ..utils.rational import Vector
from .groups import FiniteSet, check_same_group
from .lattice import DEFAULT_LIMIT
from .progressions import Progression, ev, image_set

SUMSET_GUARD = 10 ** 9


def _dedupe(sorted_points: Iterator[Vector]) -> List[Vector]:
    out: List[Vector] = []
    for p in sorted_points:
        if not out or out[-1] != p:
            out.append(p)
    return out


def sumset(a_set: FiniteSet, b_set: FiniteSet, guard: int = SUMSET_GUARD) -> FiniteSet:
    """{a + b}, exact, by a k-way merge of the sorted rows a + B.

    Raises:
        GroupMismatchError: If the sets live in different dimensions.
        TruncationError: If |A|*|B| exceeds ``guard``.
    """
    group = check_same_group(a_set, b_set)
    pairs = len(a_set) * len(b_set)
    if pairs > guard:
        raise TruncationError(f"Sumset of {pairs} pairs exceeds guard {guard}", limit=guard)
    # translation preserves lexicographic order, so every row is already sorted
    rows = [[rq.add(a, b) for b in b_set.elements] for a in a_set.elements]
    return FiniteSet(group, tuple(_dedupe(heapq.merge(*rows))))


def doubling_constant(a_set: FiniteSet) -> Fraction:
    """K = |A + A| / |A|."""
    if len(a_set) == 0:
        raise DomainError("Doubling constant of the empty set is undefined")
    return Fraction(len(sumset(a_set, a_set)), len(a_set))


@dataclass(frozen=True)
class CoverResult:
    ok: bool
    witness: Optional[Vector] = None

    def to_dict(self) -> dict:
        if self.ok:
            return {"ok": True}
        return {"ok": False, "witness": [rq.format_fraction(c) for c in self.witness]}


def verify_cover(
    a_set: FiniteSet,
    p: Progression,
    x_set: FiniteSet,
    limit: int = DEFAULT_LIMIT,
) -> CoverResult:
    """Check A ⊆ P + X exactly; the witness is the first uncovered a."""
    check_same_group(a_set, x_set)
    if a_set.group.m != p.frame.group.m:
        raise DomainError(f"Set dimension {a_set.group.m} differs from frame dimension {p.frame.group.m}")
    image = image_set(p, limit).set
    for a in a_set:
        if not any(rq.sub(a, x) in image for x in x_set):
            logger.debug(f"Element {[str(c) for c in a]} is not covered by P + X")
            return CoverResult(False, a)
    return CoverResult(True)


def greedy_cover(a_set: FiniteSet, p: Progression, limit: int = DEFAULT_LIMIT) -> FiniteSet:
    """A translate set X with A ⊆ P + X and |X| <= |A|.

    Repeatedly takes the smallest uncovered a and adds x = a - ev(n*), where
    n* is the lattice point of P of least gauge (ties lexicographic).
    """
    if a_set.group.m != p.frame.group.m:
        raise DomainError(f"Set dimension {a_set.group.m} differs from frame dimension {p.frame.group.m}")
    group = a_set.group.join(p.frame.group)
    if len(a_set) == 0:
        return FiniteSet.empty(group)
    points = p.lattice_points(limit)
    if points.truncated:
        raise TruncationError(f"Progression has more than {limit} lattice points", partial=points, limit=limit)
    if points.count == 0:
        raise DomainError("Progression has no lattice points")
    n_star = min(points, key=lambda n: (p.body.gauge_key(rq.sub(n, p.center)), n))
    anchor = ev(p.frame, n_star)
    image = image_set(p, limit).set

    translates: List[Vector] = []
    covered = set()
    for a in a_set:
        if a in covered:
            continue
        x = rq.sub(a, anchor)
        translates.append(x)
        covered.update(b for b in a_set if b not in covered and rq.sub(b, x) in image)
    logger.info(f"Greedy cover uses {len(translates)} translates for |A| = {len(a_set)}")
    return FiniteSet.of(group, translates)
