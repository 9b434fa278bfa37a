"""Origin-symmetric convex bodies: gauges, support, scaling, volumes, Minkowski sums.

Every membership decision here is exact (rational). Floating point is used only
for volumes and for Minkowski-sum membership, which feed Monte Carlo estimates.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.spatial import ConvexHull, HalfspaceIntersection

from ..core.errors import (
    DimensionMismatchError,
    DomainError,
    RankDeficientError,
    SamplingError,
)
from ..utils import rational as rq
from ..utils.rational import Matrix, RationalLike, Vector
from ..utils.rng import map_blocks, substream
from . import simplex


class BodyKind(str, Enum):
    """Representation of a symmetric body."""
    ELLIPSOID = "ellipsoid"
    POLYTOPE = "polytope"


class Ordering(str, Enum):
    """Exact order of a gauge against a threshold."""
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


class VolumeMethod(str, Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class VolumeEstimate:
    """A volume (or volume ratio) with its standard error."""
    value: float
    std_error: float
    method: VolumeMethod
    samples: int

    def __post_init__(self):
        if self.value < 0 or self.std_error < 0:
            raise DomainError("Volume estimates are nonnegative")
        exact = self.method == VolumeMethod.EXACT
        if exact != (self.std_error == 0) or exact != (self.samples == 0):
            raise DomainError("Exact estimates carry no error and no samples, MC estimates carry both")

    @classmethod
    def exact(cls, value: float) -> "VolumeEstimate":
        return cls(float(value), 0.0, VolumeMethod.EXACT, 0)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method.value,
            "samples": self.samples,
        }


@dataclass(frozen=True)
class SymmetricBody:
    """An origin-symmetric convex body in R^d.

    Ellipsoid: {x : x^T gram x <= 1}. Polytope: {x : |<form_i, x>| <= 1 for all i}.
    Use the ``ellipsoid``/``polytope``/``box`` constructors.
    """
    kind: BodyKind
    dim: int
    gram: Optional[Matrix] = None
    forms: Optional[Matrix] = None

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("Body dimension must be >= 1")
        if self.kind == BodyKind.ELLIPSOID:
            if self.gram is None or self.forms is not None:
                raise DomainError("Ellipsoid bodies carry a Gram matrix only")
            if len(self.gram) != self.dim or any(len(r) != self.dim for r in self.gram):
                raise DimensionMismatchError(f"Gram matrix must be {self.dim}x{self.dim}")
            rq.ldl(self.gram)
        else:
            if self.forms is None or self.gram is not None:
                raise DomainError("Polytope bodies carry linear forms only")
            if any(len(r) != self.dim for r in self.forms):
                raise DimensionMismatchError(f"Every form must have {self.dim} coefficients")
            if len(self.forms) < self.dim or rq.rank(self.forms) != self.dim:
                raise RankDeficientError("Polytope forms must have column rank d (bounded body)")

    @classmethod
    def ellipsoid(cls, gram: Sequence[Sequence[RationalLike]]) -> "SymmetricBody":
        g = rq.matrix(gram)
        return cls(BodyKind.ELLIPSOID, len(g), gram=g)

    @classmethod
    def polytope(cls, forms: Sequence[Sequence[RationalLike]]) -> "SymmetricBody":
        f = rq.matrix(forms)
        if not f:
            raise RankDeficientError("Polytope needs at least one form")
        return cls(BodyKind.POLYTOPE, len(f[0]), forms=f)

    @classmethod
    def box(cls, radii: Sequence[RationalLike]) -> "SymmetricBody":
        """Axis-aligned box prod [-r_i, r_i]; r_i = 0 is encoded by the form 2*e_i."""
        rs = rq.vector(radii)
        d = len(rs)
        rows = []
        for i, r in enumerate(rs):
            if r < 0:
                raise DomainError(f"Box radius {r} is negative")
            coef = Fraction(2) if r == 0 else 1 / r
            rows.append(tuple(coef if j == i else Fraction(0) for j in range(d)))
        return cls.polytope(rows)

    @classmethod
    def ball(cls, radius: RationalLike, dim: int) -> "SymmetricBody":
        r = rq.to_fraction(radius)
        if r <= 0:
            raise DomainError("Ball radius must be positive")
        return cls.ellipsoid(rq.mat_scale(rq.identity(dim), 1 / (r * r)))

    @property
    def is_ellipsoid(self) -> bool:
        return self.kind == BodyKind.ELLIPSOID

    @cached_property
    def gram_inverse(self) -> Matrix:
        return rq.inverse(self.gram)

    @cached_property
    def float_matrix(self) -> np.ndarray:
        """Gram (ellipsoid) or forms (polytope) as a float array."""
        return rq.to_float_array(self.gram if self.is_ellipsoid else self.forms)

    @cached_property
    def float_gram_inverse(self) -> np.ndarray:
        return rq.to_float_array(self.gram_inverse)

    @cached_property
    def axis_radii(self) -> Optional[Vector]:
        """Half side lengths if this is an axis-aligned box, else None."""
        if self.is_ellipsoid:
            return None
        coef: List[Fraction] = [Fraction(0)] * self.dim
        for row in self.forms:
            nonzero = [j for j, v in enumerate(row) if v != 0]
            if len(nonzero) != 1:
                return None
            j = nonzero[0]
            coef[j] = max(coef[j], abs(row[j]))
        return tuple(1 / c for c in coef)

    @cached_property
    def vertices(self) -> np.ndarray:
        """Float vertex list of a polytope body."""
        if self.is_ellipsoid:
            raise DomainError("Ellipsoids have no vertices")
        forms = self.float_matrix
        if self.dim == 1:
            r = 1.0 / np.max(np.abs(forms))
            return np.array([[-r], [r]])
        halfspaces = np.vstack([
            np.hstack([forms, -np.ones((len(forms), 1))]),
            np.hstack([-forms, -np.ones((len(forms), 1))]),
        ])
        hs = HalfspaceIntersection(halfspaces, np.zeros(self.dim))
        return np.unique(np.round(hs.intersections, 12), axis=0)

    def gauge_key(self, x: Sequence[RationalLike]) -> Fraction:
        """Exact squared gauge of x (monotone in the gauge, no square roots)."""
        v = rq.vector(x)
        rq.check_dim(v, self.dim)
        if self.is_ellipsoid:
            return rq.quad_form(self.gram, v)
        return max(abs(rq.dot(f, v)) for f in self.forms) ** 2

    def contains(self, x: Sequence[RationalLike]) -> bool:
        return self.gauge_key(x) <= 1

    def gauge_values(self, points: np.ndarray) -> np.ndarray:
        """Float gauges of the rows of ``points``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_ellipsoid:
            q = np.einsum("ij,ij->i", pts @ self.float_matrix, pts)
            return np.sqrt(np.maximum(q, 0.0))
        return np.max(np.abs(pts @ self.float_matrix.T), axis=1)

    def to_dict(self) -> dict:
        if self.is_ellipsoid:
            return {"type": "ellipsoid", "gram": [[rq.format_fraction(x) for x in r] for r in self.gram]}
        return {"type": "polytope", "forms": [[rq.format_fraction(x) for x in r] for r in self.forms]}


@dataclass(frozen=True)
class SupportResult:
    """Maximizer of <u, x> over a body and the maximum value.

    Coordinates are Fractions when exact (polytopes, rational-square ellipsoid
    cases) and floats otherwise.
    """
    point: Tuple[Union[Fraction, float], ...]
    value: Union[Fraction, float]


def gauge_compare(body: SymmetricBody, x: Sequence[RationalLike], t: RationalLike = 1) -> Ordering:
    """Exact order of gauge_body(x) against t.

    Raises:
        DimensionMismatchError: If len(x) != body.dim.
        DomainError: If t < 0.
    """
    t = rq.to_fraction(t)
    if t < 0:
        raise DomainError(f"Gauge threshold must be nonnegative, got {t}")
    key = body.gauge_key(x)
    bound = t * t
    if key < bound:
        return Ordering.LT
    if key == bound:
        return Ordering.EQ
    return Ordering.GT


def support_point(body: SymmetricBody, u: Sequence[RationalLike]) -> SupportResult:
    """Maximize <u, x> over the body.

    Ellipsoids use the closed form gram^{-1} u / sqrt(u^T gram^{-1} u); polytopes
    an exact simplex with Bland's rule, ties broken towards the lexicographically
    smallest optimal vertex.
    """
    direction = rq.vector(u)
    rq.check_dim(direction, body.dim, "direction")
    if all(c == 0 for c in direction):
        raise DomainError("Support direction must be nonzero")

    if body.is_ellipsoid:
        w = rq.mat_vec(body.gram_inverse, direction)
        s = rq.dot(direction, w)
        lo, hi = rq.sqrt_bounds(s)
        if lo == hi:
            return SupportResult(tuple(c / lo for c in w), lo)
        root = math.sqrt(float(s))
        return SupportResult(tuple(float(c) / root for c in w), root)

    d = body.dim
    forms = body.forms
    # z = (x+, x-), x = x+ - x-
    a = [list(f) + [-c for c in f] for f in forms] + [[-c for c in f] + list(f) for f in forms]
    b = [Fraction(1)] * (2 * len(forms))
    costs = [list(direction) + [-c for c in direction]]
    for i in range(d):
        e = [Fraction(0)] * (2 * d)
        e[i], e[d + i] = Fraction(-1), Fraction(1)
        costs.append(e)
    z, values = simplex.maximize(a, b, costs)
    point = tuple(z[i] - z[d + i] for i in range(d))
    return SupportResult(point, values[0])


def scale_body(body: SymmetricBody, t: RationalLike) -> SymmetricBody:
    """Return t * body."""
    t = rq.to_fraction(t)
    if t <= 0:
        raise DomainError(f"Scale must be positive, got {t}")
    if body.is_ellipsoid:
        return SymmetricBody.ellipsoid(rq.mat_scale(body.gram, 1 / (t * t)))
    return SymmetricBody.polytope(rq.mat_scale(body.forms, 1 / t))


def unit_ball_volume(d: int) -> float:
    """Volume of the Euclidean unit ball in R^d (recurrence w_d = 2 pi / d * w_{d-2})."""
    omega = [1.0, 2.0]
    for k in range(2, d + 1):
        omega.append(2.0 * math.pi / k * omega[k - 2])
    return omega[d]


def bounding_box(body: SymmetricBody) -> Vector:
    """Radii r_i with body inside prod [-r_i, r_i] (rational, rounded outward)."""
    if body.is_ellipsoid:
        inv = body.gram_inverse
        return tuple(rq.sqrt_upper(inv[i][i]) for i in range(body.dim))
    if body.axis_radii is not None:
        return body.axis_radii
    radii = []
    for i in range(body.dim):
        e = [Fraction(int(i == j)) for j in range(body.dim)]
        radii.append(support_point(body, e).value)
    return tuple(radii)


def _mc_hit_volume(
    indicator: Callable[[np.ndarray], np.ndarray],
    radii: np.ndarray,
    samples: int,
    seed: int,
    block_size: int,
    workers: int,
) -> VolumeEstimate:
    """Rejection estimate of vol{x in box : indicator(x)} over the box prod [-r_i, r_i]."""

    def count_block(index: int, n: int) -> int:
        pts = substream(seed, index).uniform(-radii, radii, size=(n, len(radii)))
        return int(np.count_nonzero(indicator(pts)))

    hits = sum(map_blocks(count_block, samples, block_size, workers))
    box_volume = float(np.prod(2.0 * radii))
    p = hits / samples
    p_smoothed = (hits + 0.5) / (samples + 1)
    std_error = box_volume * math.sqrt(p_smoothed * (1.0 - p_smoothed) / samples)
    return VolumeEstimate(box_volume * p, std_error, VolumeMethod.MONTE_CARLO, samples)


def volume(
    body: SymmetricBody,
    mc_samples: int = 100_000,
    seed: int = 0,
    block_size: int = 8192,
    workers: int = 1,
) -> VolumeEstimate:
    """Volume of a body: exact for ellipsoids and parallelepipeds, Monte Carlo otherwise.

    Raises:
        DomainError: If Monte Carlo is needed and mc_samples < 1.
    """
    if body.is_ellipsoid:
        det = rq.determinant(body.gram)
        return VolumeEstimate.exact(unit_ball_volume(body.dim) / math.sqrt(float(det)))
    if body.axis_radii is not None:
        return VolumeEstimate.exact(float(math.prod(2 * r for r in body.axis_radii)))
    if len(body.forms) == body.dim:
        # parallelepiped: image of [-1, 1]^d under forms^{-1}
        return VolumeEstimate.exact(float(Fraction(2 ** body.dim) / abs(rq.determinant(body.forms))))
    if mc_samples < 1:
        raise DomainError("General polytope volume needs mc_samples >= 1")
    radii = np.array([float(r) for r in bounding_box(body)])
    estimate = _mc_hit_volume(
        lambda pts: body.gauge_values(pts) <= 1.0, radii, mc_samples, seed, block_size, workers
    )
    logger.debug(f"MC volume {estimate.value:.6g} +- {estimate.std_error:.2g} ({mc_samples} samples)")
    return estimate


def _polytope_distance_sq(points: np.ndarray, forms: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from each row of ``points`` to {w : |forms w| <= 1}.

    The nearest point is the projection onto the affine hull of some face, so the
    minimum over all feasible face projections is exact.
    """
    n, d = points.shape
    feas_tol = 1e-9
    best = np.full(n, np.inf)
    inside = np.all(np.abs(points @ forms.T) <= 1.0 + feas_tol, axis=1)
    best[inside] = 0.0
    todo = ~inside
    if not np.any(todo):
        return best
    z = points[todo]
    sub_best = best[todo]
    k = len(forms)
    for size in range(1, d + 1):
        for rows in combinations(range(k), size):
            fs = forms[list(rows)]
            if np.linalg.matrix_rank(fs) < size:
                continue
            proj = fs.T @ np.linalg.inv(fs @ fs.T)
            base = z @ fs.T
            for signs in product((-1.0, 1.0), repeat=size):
                w = z - (base - np.array(signs)) @ proj.T
                ok = np.all(np.abs(w @ forms.T) <= 1.0 + feas_tol, axis=1)
                dist = np.einsum("ij,ij->i", z - w, z - w)
                better = ok & (dist < sub_best)
                sub_best[better] = dist[better]
    best[todo] = sub_best
    return best


class MinkowskiSum:
    """Membership oracle for t1*C + t2*B (float, with gauge slack ``tol``).

    ellipsoid + ellipsoid: Frank-Wolfe on the squared gauge of t2*B over t1*C,
        with the closed-form support oracle and gap-certified early exit.
    ellipsoid + polytope: whiten by the ellipsoid's Cholesky factor, then the
        exact Euclidean distance to the polytope by face projection.
    polytope + polytope: qhull facets of the pairwise vertex sums.
    """

    def __init__(
        self,
        c_body: SymmetricBody,
        t1: RationalLike,
        b_body: SymmetricBody,
        t2: RationalLike,
        tol: float = 1e-6,
        steps_per_dim: int = 200,
    ):
        if c_body.dim != b_body.dim:
            raise DimensionMismatchError(f"Bodies have dimensions {c_body.dim} and {b_body.dim}")
        self.t1 = float(rq.to_fraction(t1))
        self.t2 = float(rq.to_fraction(t2))
        if self.t1 <= 0 or self.t2 <= 0 or tol <= 0:
            raise DomainError("Minkowski scales and tolerance must be positive")
        self.c_body = c_body
        self.b_body = b_body
        self.dim = c_body.dim
        self.tol = tol
        self.budget = steps_per_dim * self.dim
        self.threshold = (1.0 + tol) ** 2

        if c_body.is_ellipsoid and b_body.is_ellipsoid:
            self.method = "frank_wolfe"
            self._objective = b_body.float_matrix / self.t2 ** 2
            self._set_inverse = c_body.float_gram_inverse
            self._set_scale = self.t1
        elif c_body.is_ellipsoid or b_body.is_ellipsoid:
            self.method = "projection"
            if b_body.is_ellipsoid:
                ell, t_ell, poly, t_poly = b_body, self.t2, c_body, self.t1
            else:
                ell, t_ell, poly, t_poly = c_body, self.t1, b_body, self.t2
            chol = np.linalg.cholesky(ell.float_matrix)
            self._whiten = chol / t_ell  # z = whiten^T x
            self._forms = (t_ell / t_poly) * poly.float_matrix @ np.linalg.inv(chol.T)
        else:
            self.method = "hull"
            if self.dim == 1:
                self._radius = self.t1 * float(bounding_box(c_body)[0]) + self.t2 * float(bounding_box(b_body)[0])
            else:
                sums = (self.t1 * c_body.vertices)[:, None, :] + (self.t2 * b_body.vertices)[None, :, :]
                hull = ConvexHull(sums.reshape(-1, self.dim))
                self._normals = hull.equations[:, :-1]
                self._offsets = -hull.equations[:, -1]
        logger.debug(f"Minkowski oracle uses {self.method} (d={self.dim})")

    def bounding_radii(self) -> np.ndarray:
        rc = np.array([float(r) for r in bounding_box(self.c_body)])
        rb = np.array([float(r) for r in bounding_box(self.b_body)])
        return self.t1 * rc + self.t2 * rb

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.method == "hull":
            if self.dim == 1:
                gauge = np.abs(pts[:, 0]) / self._radius
            else:
                gauge = np.max((pts @ self._normals.T) / self._offsets, axis=1)
            return gauge <= 1.0 + self.tol
        if self.method == "projection":
            dist_sq = _polytope_distance_sq(pts @ self._whiten, self._forms)
            return dist_sq <= self.threshold
        return self._frank_wolfe(pts)

    def _set_support(self, directions: np.ndarray) -> np.ndarray:
        w = directions @ self._set_inverse
        norms = np.sqrt(np.einsum("ij,ij->i", w, directions))
        return self._set_scale * w / norms[:, None]

    def _frank_wolfe(self, targets: np.ndarray) -> np.ndarray:
        g = self._objective
        n = len(targets)
        y = np.zeros_like(targets)
        result = np.zeros(n, dtype=bool)
        active = np.ones(n, dtype=bool)
        for _ in range(self.budget):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            r = targets[idx] - y[idx]
            gr = r @ g
            phi = np.einsum("ij,ij->i", r, gr)
            inside = phi <= self.threshold
            result[idx[inside]] = True
            active[idx[inside]] = False
            keep = ~inside
            idx, gr, phi = idx[keep], gr[keep], phi[keep]
            if idx.size == 0:
                break
            step = self._set_support(gr) - y[idx]
            slope = np.einsum("ij,ij->i", gr, step)
            outside = phi - 2.0 * slope > self.threshold
            active[idx[outside]] = False
            keep = ~outside
            idx, step, slope = idx[keep], step[keep], slope[keep]
            curvature = np.einsum("ij,ij->i", step @ g, step)
            gamma = np.clip(slope / np.maximum(curvature, 1e-300), 0.0, 1.0)
            y[idx] += gamma[:, None] * step
        idx = np.flatnonzero(active)
        if idx.size:
            r = targets[idx] - y[idx]
            result[idx] = np.einsum("ij,ij->i", r @ g, r) <= self.threshold
        return result


def minkowski_member(
    x: Sequence[RationalLike],
    c_body: SymmetricBody,
    t1: RationalLike,
    b_body: SymmetricBody,
    t2: RationalLike,
    tol: float = 1e-6,
    steps_per_dim: int = 200,
) -> bool:
    """Decide x in t1*C + t2*B up to gauge slack ``tol``."""
    oracle = MinkowskiSum(c_body, t1, b_body, t2, tol, steps_per_dim)
    point = np.array([float(rq.to_fraction(v)) for v in x])
    if point.shape != (oracle.dim,):
        raise DimensionMismatchError(f"Point has dimension {len(point)}, expected {oracle.dim}")
    return bool(oracle.contains(point[None, :])[0])


def minkowski_volume_mc(
    c_body: SymmetricBody,
    t1: RationalLike,
    t2: RationalLike,
    b_body: SymmetricBody,
    samples: int = 100_000,
    seed: int = 0,
    tol: float = 1e-6,
    steps_per_dim: int = 200,
    block_size: int = 8192,
    workers: int = 1,
) -> VolumeEstimate:
    """Monte Carlo estimate of vol(t1*C + t2*B), deterministic for a fixed seed.

    Raises:
        SamplingError: If samples < 1000.
    """
    if samples < 1000:
        raise SamplingError(f"Minkowski volume needs at least 1000 samples, got {samples}")
    oracle = MinkowskiSum(c_body, t1, b_body, t2, tol, steps_per_dim)
    estimate = _mc_hit_volume(oracle.contains, oracle.bounding_radii(), samples, seed, block_size, workers)
    logger.debug(
        f"vol({oracle.t1:g}C + {oracle.t2:g}B) ~ {estimate.value:.6g} +- {estimate.std_error:.2g} "
        f"via {oracle.method}"
    )
    return estimate
