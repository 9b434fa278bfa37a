"""Ambient groups Z^m / Q^m and finite subsets of them."""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

from ..core.errors import DimensionMismatchError, DomainError, GroupMismatchError
from ..utils import rational as rq
from ..utils.rational import RationalLike, Vector


class CoordinateKind(str, Enum):
    INTEGER = "integer"
    RATIONAL = "rational"


@dataclass(frozen=True)
class AmbientGroup:
    """Z^m (integer coordinates) or R^m with exact rational coordinates."""
    m: int
    kind: CoordinateKind = CoordinateKind.INTEGER

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"Group dimension must be >= 1, got {self.m}")

    def point(self, coords: Sequence[RationalLike]) -> Vector:
        """Validate and normalize a group element."""
        v = rq.vector(coords)
        if len(v) != self.m:
            raise DimensionMismatchError(f"Group point has dimension {len(v)}, expected {self.m}")
        if self.kind == CoordinateKind.INTEGER and not rq.is_integral(v):
            raise DomainError(f"Point {[str(c) for c in v]} is not in Z^{self.m}")
        return v

    def zero(self) -> Vector:
        return self.point([0] * self.m)

    def join(self, other: "AmbientGroup") -> "AmbientGroup":
        """Smallest group containing both (Z^m inside Q^m)."""
        if self.m != other.m:
            raise GroupMismatchError(f"Groups of dimension {self.m} and {other.m}")
        if self.kind == other.kind:
            return self
        return AmbientGroup(self.m, CoordinateKind.RATIONAL)


@dataclass(frozen=True)
class FiniteSet:
    """Sorted, deduplicated finite subset of an ambient group."""
    group: AmbientGroup
    elements: Tuple[Vector, ...]

    def __post_init__(self):
        for a, b in zip(self.elements, self.elements[1:]):
            if not a < b:
                raise DomainError("FiniteSet elements must be sorted and unique; use FiniteSet.of")

    @classmethod
    def of(cls, group: AmbientGroup, points: Iterable[Sequence[RationalLike]]) -> "FiniteSet":
        return cls(group, tuple(sorted({group.point(p) for p in points})))

    @classmethod
    def empty(cls, group: AmbientGroup) -> "FiniteSet":
        return cls(group, ())

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, point) -> bool:
        return tuple(rq.vector(point)) in self._lookup

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    def translate(self, t: Sequence[RationalLike]) -> "FiniteSet":
        shift = self.group.point(t)
        return FiniteSet.of(self.group, (rq.add(a, shift) for a in self.elements))

    def to_dict(self) -> dict:
        return {
            "m": self.group.m,
            "kind": self.group.kind.value,
            "elements": [[rq.format_fraction(c) for c in a] for a in self.elements],
        }


def check_same_group(*sets: FiniteSet) -> AmbientGroup:
    """Return the common (joined) group of the sets, or raise GroupMismatchError."""
    group = sets[0].group
    for s in sets[1:]:
        group = group.join(s.group)
    return group
