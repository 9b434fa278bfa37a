"""Deterministic generators for progressions and the sets they cover."""

from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from ..core.errors import DomainError, InternalError, SamplingError
from ..utils import rational as rq
from ..utils.rational import RationalLike
from ..utils.rng import substream
from .bodies import SymmetricBody, unit_ball_volume
from .groups import AmbientGroup, CoordinateKind, FiniteSet
from .lattice import DEFAULT_LIMIT, enumerate_lattice
from .progressions import Frame, Progression, ProgressionKind, gap_to_convex, image_set
from .setops import verify_cover

Instance = Tuple[FiniteSet, Progression, FiniteSet]

MIN_COUNT = 10
MAX_COUNT = 100_000
RESAMPLE_BUDGET = 100


def _checked(a_set: FiniteSet, p: Progression, x_set: FiniteSet, limit: int) -> Instance:
    result = verify_cover(a_set, p, x_set, limit)
    if not result.ok:
        raise InternalError(f"Generated instance is not covered; witness {result.witness}")
    return a_set, p, x_set


def _zero_set(group: AmbientGroup) -> FiniteSet:
    return FiniteSet.of(group, [group.zero()])


def make_ap(N: int, step: RationalLike = 1, base: RationalLike = 0, limit: int = DEFAULT_LIMIT) -> Instance:
    """A = {base + k*step : 0 <= k < N} with its rank-1 GAP and X = {0}."""
    if N < 1:
        raise DomainError(f"AP length must be >= 1, got {N}")
    step, base = rq.to_fraction(step), rq.to_fraction(base)
    integral = step.denominator == 1 and base.denominator == 1
    group = AmbientGroup(1, CoordinateKind.INTEGER if integral else CoordinateKind.RATIONAL)
    frame = Frame.of(group, [base], [[step]])
    return make_gap(frame, (N,), limit)


def make_gap(frame: Frame, lengths, limit: int = DEFAULT_LIMIT) -> Instance:
    """A = image of the GAP with the given lengths, covered by X = {0}."""
    p = gap_to_convex(tuple(lengths), frame)
    a_set = image_set(p, limit).set
    return _checked(a_set, p, _zero_set(frame.group), limit)


def make_random_convex_progression(
    d: int,
    k: int,
    seed: int = 0,
    scale: RationalLike = 1,
    frame: Optional[Frame] = None,
    entry_bound: int = 5,
) -> Progression:
    """Random symmetric polytope progression with 10 <= |C ∩ Z^d| <= 1e5.

    Forms have integer entries in [-entry_bound, entry_bound] divided by
    ``scale``; the scale is doubled or halved until the count is in range.
    k == d gives a Skew progression, k > d a Convex one.
    """
    if d < 1 or k < d:
        raise DomainError(f"Need d >= 1 and k >= d forms, got d={d}, k={k}")
    rng = substream(seed, 0)
    for _ in range(RESAMPLE_BUDGET):
        raw = rng.integers(-entry_bound, entry_bound + 1, size=(k, d))
        forms = rq.matrix(raw.tolist())
        if rq.rank(forms) == d:
            break
    else:
        raise SamplingError(f"No rank-{d} form matrix after {RESAMPLE_BUDGET} draws")

    s = rq.to_fraction(scale)
    if s <= 0:
        raise DomainError("scale must be positive")
    body = None
    for _ in range(64):
        body = SymmetricBody.polytope(rq.mat_scale(forms, 1 / s))
        points = enumerate_lattice(body, None, MAX_COUNT)
        if points.truncated:
            s /= 2
        elif points.count < MIN_COUNT:
            s *= 2
        else:
            break
    else:
        raise SamplingError("Could not scale the random body into the target count range")

    frame = frame or Frame.standard(d)
    kind = ProgressionKind.SKEW if k == d else ProgressionKind.CONVEX
    logger.debug(f"Random {kind.value} progression: d={d}, k={k}, scale={s}, count={points.count}")
    return Progression(frame, body, tuple(Fraction(0) for _ in range(d)), kind)


def make_random_convex_instance(d: int, k: int, seed: int = 0, scale: RationalLike = 1) -> Instance:
    """(A, P, {0}) with P from make_random_convex_progression and A its image."""
    p = make_random_convex_progression(d, k, seed, scale)
    a_set = image_set(p).set
    return _checked(a_set, p, _zero_set(p.frame.group), DEFAULT_LIMIT)


def _random_basis(m: int, h: int, seed: int) -> np.ndarray:
    rng = substream(seed, 0)
    for _ in range(RESAMPLE_BUDGET):
        basis = rng.integers(-h, h + 1, size=(m, m))
        if rq.determinant(rq.matrix(basis.tolist())) != 0:
            return basis
    raise SamplingError(f"Integer basis still singular after {RESAMPLE_BUDGET} draws")


def _lovett_regev_progression(m: int, radius: Fraction, h: int, seed: int) -> Progression:
    basis = _random_basis(m, h, seed)
    det = abs(rq.determinant(rq.matrix(basis.tolist())))
    # covolume ~ 1: scale by |det|^{-1/m}, kept rational
    alpha = Fraction(float(det) ** (-1.0 / m)).limit_denominator(10 ** 6)
    scaled = rq.mat_scale(rq.matrix(basis.tolist()), alpha)
    columns = rq.transpose(scaled)
    group = AmbientGroup(m, CoordinateKind.INTEGER if alpha.denominator == 1 else CoordinateKind.RATIONAL)
    frame = Frame.of(group, [0] * m, columns)
    gram = rq.mat_scale(rq.mat_mul(rq.transpose(scaled), scaled), 1 / (radius * radius))
    return Progression(frame, SymmetricBody.ellipsoid(gram), tuple(Fraction(0) for _ in range(m)),
                       ProgressionKind.ELLIPSOID)


def make_lovett_regev(
    m: int,
    R: RationalLike,
    h: int = 10,
    seed: int = 0,
    limit: int = DEFAULT_LIMIT,
) -> Tuple[FiniteSet, Progression]:
    """A = (ball of radius R) ∩ (random full-rank lattice), with the ellipsoid progression covering it.

    The lattice basis has integer entries in [-h, h], rescaled rationally to
    covolume close to 1.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if m > 6:
        logger.warning(f"Lovett-Regev with m={m} may be slow; desk scale is m <= 6")
    radius = rq.to_fraction(R)
    if radius <= 0:
        raise DomainError("R must be positive")
    p = _lovett_regev_progression(m, radius, h, seed)
    a_set = image_set(p, limit).set
    _checked(a_set, p, _zero_set(p.frame.group), limit)
    logger.info(f"Lovett-Regev instance: m={m}, R={radius}, |A|={len(a_set)}")
    return a_set, p


def search_radius(
    m: int,
    h: int = 10,
    seed: int = 0,
    lo: int = 50,
    hi: int = 500,
    limit: int = DEFAULT_LIMIT,
) -> Fraction:
    """Find R with lo <= |A| <= hi for make_lovett_regev(m, R, h, seed).

    Starts from the Gaussian heuristic |A| ~ omega_m R^m and bisects.
    """
    if not 1 <= lo <= hi:
        raise DomainError(f"Need 1 <= lo <= hi, got [{lo}, {hi}]")
    target = (lo + hi) / 2.0
    guess = (target / unit_ball_volume(m)) ** (1.0 / m)
    low, high = Fraction(0), None
    radius = Fraction(guess).limit_denominator(1000)
    for _ in range(60):
        count = enumerate_lattice(_lovett_regev_progression(m, radius, h, seed).body, None, hi + 1).count
        if lo <= count <= hi:
            return radius
        if count > hi:
            high = radius
        else:
            low = radius
        radius = (low + high) / 2 if high is not None else radius * 2
    raise DomainError(f"No radius found with |A| in [{lo}, {hi}]")
