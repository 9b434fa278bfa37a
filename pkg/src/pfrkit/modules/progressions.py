"""Progressions: frames, the four body kinds, size vs cardinality, Gaussian densities."""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..core.errors import DimensionMismatchError, DomainError, NotPositiveDefiniteError, TruncationError
from ..utils import rational as rq
from ..utils.rational import RationalLike, Vector
from .bodies import SymmetricBody
from .groups import AmbientGroup, FiniteSet
from .lattice import DEFAULT_LIMIT, LatticePointSet, count_lattice, enumerate_lattice


@dataclass(frozen=True)
class Frame:
    """Affine data a0; a1..ad mapping coefficient vectors into the group."""
    group: AmbientGroup
    a0: Vector
    generators: Tuple[Vector, ...]

    def __post_init__(self):
        self.group.point(self.a0)
        for g in self.generators:
            self.group.point(g)

    @classmethod
    def of(
        cls,
        group: AmbientGroup,
        a0: Sequence[RationalLike],
        generators: Sequence[Sequence[RationalLike]],
    ) -> "Frame":
        return cls(group, group.point(a0), tuple(group.point(g) for g in generators))

    @classmethod
    def standard(cls, d: int) -> "Frame":
        """Identity frame of Z^d (a0 = 0, a_i = e_i)."""
        group = AmbientGroup(d)
        return cls.of(group, [0] * d, rq.identity(d))

    @property
    def d(self) -> int:
        return len(self.generators)

    def linear(self, y: Sequence[RationalLike]) -> Vector:
        """sum y_i a_i (the linear part, without a0)."""
        coeffs = rq.vector(y)
        rq.check_dim(coeffs, self.d, "coefficient vector")
        total = [Fraction(0)] * self.group.m
        for c, g in zip(coeffs, self.generators):
            if c:
                for k in range(self.group.m):
                    total[k] += c * g[k]
        return tuple(total)

    def to_dict(self) -> dict:
        return {
            "m": self.group.m,
            "group": self.group.kind.value,
            "a0": [rq.format_fraction(c) for c in self.a0],
            "gens": [[rq.format_fraction(c) for c in g] for g in self.generators],
        }


class ProgressionKind(str, Enum):
    GAP = "gap"
    CONVEX = "convex"
    ELLIPSOID = "ellipsoid"
    SKEW = "skew"


@dataclass(frozen=True)
class Progression:
    """Frame image of the lattice points n with n - center in body."""
    frame: Frame
    body: SymmetricBody
    center: Vector
    kind: ProgressionKind

    def __post_init__(self):
        if self.body.dim != self.frame.d:
            raise DimensionMismatchError(
                f"Body dimension {self.body.dim} does not match frame rank {self.frame.d}"
            )
        rq.check_dim(self.center, self.body.dim, "center")
        if self.kind == ProgressionKind.ELLIPSOID and not self.body.is_ellipsoid:
            raise DomainError("Ellipsoid progressions need an ellipsoid body")
        if self.kind == ProgressionKind.SKEW and (
            self.body.is_ellipsoid or len(self.body.forms) != self.body.dim
        ):
            raise DomainError("Skew progressions need a polytope with exactly d forms")
        if self.kind == ProgressionKind.GAP:
            radii = self.body.axis_radii
            if radii is None:
                raise DomainError("GAP progressions need an axis-aligned box")
            for r, c in zip(radii, self.center):
                # N_i = 1 is stored as radius 1/2 around center 0
                single = r == Fraction(1, 2) and c == 0
                if not single and ((2 * r).denominator != 1 or c != r):
                    raise DomainError("GAP box must have half-integer radii (N-1)/2 and center (N-1)/2")

    @property
    def gap_lengths(self) -> Optional[Tuple[int, ...]]:
        """N_1..N_d for a GAP, else None."""
        if self.kind != ProgressionKind.GAP:
            return None
        return tuple(int(2 * c) + 1 for c in self.center)

    def lattice_points(self, limit: int = DEFAULT_LIMIT) -> LatticePointSet:
        return enumerate_lattice(self.body, self.center, limit)

    def to_dict(self) -> dict:
        return {
            "frame": self.frame.to_dict(),
            "body": self.body.to_dict(),
            "center": [rq.format_fraction(c) for c in self.center],
            "kind": self.kind.value,
        }


@dataclass(frozen=True)
class ImageReport:
    """Image of a progression with its size and cardinality."""
    set: FiniteSet
    size: int
    cardinality: int

    @property
    def improper(self) -> bool:
        return self.size > self.cardinality

    def to_dict(self) -> dict:
        return {
            "set": self.set.to_dict(),
            "size": self.size,
            "cardinality": self.cardinality,
            "improper": self.improper,
        }


def ev(frame: Frame, n: Sequence[RationalLike]) -> Vector:
    """a0 + sum n_i a_i."""
    return rq.add(frame.a0, frame.linear(n))


def progression_size(p: Progression, limit: int = DEFAULT_LIMIT) -> int:
    """Number of coefficient tuples (not distinct group elements)."""
    return count_lattice(p.body, p.center, limit)


def image_set(p: Progression, limit: int = DEFAULT_LIMIT) -> ImageReport:
    """Map every lattice point through ev and deduplicate.

    Raises:
        TruncationError: If P has more than ``limit`` lattice points.
    """
    points = p.lattice_points(limit)
    if points.truncated:
        raise TruncationError(f"Progression has more than {limit} lattice points", partial=points, limit=limit)
    image = FiniteSet.of(p.frame.group, (ev(p.frame, n) for n in points))
    report = ImageReport(image, points.count, len(image))
    if report.improper:
        logger.info(f"Progression is improper: size {report.size} > cardinality {report.cardinality}")
    return report


def gap_to_convex(lengths: Sequence[int], frame: Frame) -> Progression:
    """GAP {a0 + sum n_i a_i : 0 <= n_i < N_i} as a box progression.

    Box radii and center are (N_i - 1)/2, so even lengths get half-integer
    centers and N_i = 1 becomes the form 2*e_i.
    """
    if len(lengths) != frame.d:
        raise DimensionMismatchError(f"{len(lengths)} lengths for a rank-{frame.d} frame")
    if any(n < 1 for n in lengths):
        raise DomainError(f"GAP lengths must be >= 1, got {list(lengths)}")
    half = tuple(Fraction(n - 1, 2) for n in lengths)
    return Progression(frame, SymmetricBody.box(half), half, ProgressionKind.GAP)


@dataclass
class GaussianDensity:
    """theta(x) = sum over n with ev(n) = x of exp(-n^T gram n), truncated at n^T gram n <= T."""
    group: AmbientGroup
    weights: Dict[Vector, float]
    truncation_bound: float
    total_dropped: float
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights.values())

    @property
    def l2_norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights.values()))

    def __getitem__(self, x: Sequence[RationalLike]) -> float:
        return self.weights.get(tuple(rq.vector(x)), 0.0)

    def to_dict(self) -> dict:
        return {
            "weights": [
                {"x": [rq.format_fraction(c) for c in x], "w": self.weights[x]}
                for x in sorted(self.weights)
            ],
            "truncation_bound": self.truncation_bound,
            "total_dropped": self.total_dropped,
            "total_mass": self.total_mass,
        }


def gaussian_tail_bound(T: float, lam: float, d: int) -> float:
    """Upper bound on sum_{n^T G n > T} exp(-n^T G n) when G >= lam * I."""
    return math.exp(-T / 2.0) * (1.0 + math.sqrt(2.0 * math.pi / lam)) ** d


def gaussian_density(
    frame: Frame,
    gram: Sequence[Sequence[RationalLike]],
    tail_eps: float = 1e-10,
    limit: int = DEFAULT_LIMIT,
) -> GaussianDensity:
    """Truncated Gaussian density pushed forward through the frame.

    T = max(ln(1/eps) + d ln(d+1), 2 (ln(1/eps) + d ln(1 + sqrt(2 pi / lam)))),
    lam a rounded-down smallest eigenvalue of gram; the second term makes the
    certified dropped mass at most tail_eps.
    """
    if tail_eps <= 0:
        raise DomainError(f"tail_eps must be positive, got {tail_eps}")
    body = SymmetricBody.ellipsoid(gram)
    d = body.dim
    if d != frame.d:
        raise DimensionMismatchError(f"Gram is {d}x{d} but the frame has rank {frame.d}")
    lam = float(np.linalg.eigvalsh(body.float_matrix)[0]) * (1.0 - 1e-9)
    if lam <= 0:
        raise NotPositiveDefiniteError("Gram matrix is numerically singular")

    log_inv = math.log(1.0 / tail_eps)
    T = max(
        log_inv + d * math.log(d + 1),
        2.0 * (log_inv + d * math.log(1.0 + math.sqrt(2.0 * math.pi / lam))),
    )
    shell = SymmetricBody.ellipsoid(rq.mat_scale(body.gram, 1 / Fraction(T)))
    points = enumerate_lattice(shell, None, limit)
    if points.truncated:
        raise TruncationError(f"Gaussian support exceeds {limit} lattice points", partial=points, limit=limit)

    terms: Dict[Vector, List[float]] = defaultdict(list)
    for n in points:
        terms[ev(frame, n)].append(math.exp(-float(rq.quad_form(body.gram, rq.vector(n)))))
    weights = {x: math.fsum(ws) for x, ws in sorted(terms.items())}
    dropped = gaussian_tail_bound(T, lam, d)
    logger.debug(f"Gaussian density: T={T:.3f}, {points.count} terms, {len(weights)} support points")
    return GaussianDensity(frame.group, weights, T, dropped, {"terms": points.count, "support": len(weights)})


def gaussian_correlation(a_set: FiniteSet, theta: GaussianDensity) -> float:
    """rho = <1_A, theta> / (||theta||_2 * sqrt(|A|))."""
    if len(a_set) == 0:
        raise DomainError("gaussian_correlation needs a nonempty set")
    if not theta.weights:
        raise DomainError("gaussian_correlation needs a nonempty density")
    if a_set.group.m != theta.group.m:
        raise DimensionMismatchError(f"Set lives in dimension {a_set.group.m}, density in {theta.group.m}")
    inner = math.fsum(theta.weights.get(a, 0.0) for a in a_set)
    return inner / (theta.l2_norm * math.sqrt(len(a_set)))
