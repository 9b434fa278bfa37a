"""Convex-to-ellipsoid transfer: greedy packing/covering, surrogate selection, P' and X'.

Given A ⊆ P + X with P a convex progression over body C, pick an equal-volume
surrogate B, a maximal packing Y of C ∩ Z^d by half-translates of B (so that
C ∩ Z^d ⊆ Y + B ∩ Z^d) and the analogous Z for B ∩ Z^d by C. Then
A ⊆ P' + X' with P' the progression over B and X' = X + {ā·y}.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from ..core.config import Config
from ..core.errors import CoverError, DimensionMismatchError, DomainError, TruncationError
from ..utils import rational as rq
from .bodies import (
    Ordering,
    SymmetricBody,
    VolumeEstimate,
    VolumeMethod,
    gauge_compare,
    minkowski_volume_mc,
    scale_body,
    volume,
)
from .fitting import CandidateSource, EllipsoidCandidate, candidate_ellipsoids, skew_from_ellipsoid
from .groups import FiniteSet
from .lattice import DEFAULT_LIMIT, IntVector, LatticePointSet, enumerate_lattice
from .progressions import Progression, ProgressionKind
from .setops import verify_cover

PointsLike = Union[LatticePointSet, Sequence[Sequence[int]]]


def _as_points(points: PointsLike) -> List[IntVector]:
    if isinstance(points, LatticePointSet):
        if points.truncated:
            raise TruncationError("Packing needs a complete (untruncated) point set", partial=points)
        return list(points.points)
    return [tuple(int(v) for v in p) for p in points]


def _fmt(point) -> list:
    return [int(v) if isinstance(v, int) else rq.format_fraction(v) for v in point]


def greedy_packing(points: PointsLike, body: SymmetricBody) -> List[IntVector]:
    """Maximal subset Y whose half-translates y + body/2 are interior-disjoint.

    Points are taken in order of increasing body gauge, ties lexicographic;
    x is accepted iff gauge_body(x - y) >= 1 for every accepted y.
    """
    pts = _as_points(points)
    for p in pts:
        rq.check_dim(p, body.dim, "lattice point")
    ordered = sorted(set(pts), key=lambda x: (body.gauge_key(x), x))
    accepted: List[IntVector] = []
    for x in ordered:
        if all(gauge_compare(body, rq.sub(x, y)) != Ordering.LT for y in accepted):
            accepted.append(x)
    logger.debug(f"Greedy packing kept {len(accepted)} of {len(ordered)} points")
    return accepted


@dataclass(frozen=True)
class PackingCheck:
    """Outcome of the exact packing and covering test."""
    ok: bool
    reason: str = ""
    witness: Optional[Tuple] = None

    def to_dict(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out["reason"] = self.reason
            out["witness"] = _fmt(self.witness) if self.witness is not None else None
        return out


def check_packing_covering(points: PointsLike, body: SymmetricBody, packing: Sequence[Sequence[int]]) -> PackingCheck:
    """Exact test that Y packs (pairwise gauge >= 1) and covers (every x within body of some y)."""
    pts = _as_points(points)
    ys = [tuple(int(v) for v in y) for y in packing]
    for i, y in enumerate(ys):
        for y2 in ys[i + 1:]:
            if gauge_compare(body, rq.sub(y, y2)) == Ordering.LT:
                return PackingCheck(False, "packing", y2)
    for x in pts:
        if not any(gauge_compare(body, rq.sub(x, y)) != Ordering.GT for y in ys):
            return PackingCheck(False, "covering", x)
    return PackingCheck(True)


def verify_packing_covering(points: PointsLike, body: SymmetricBody, packing: Sequence[Sequence[int]]) -> bool:
    return check_packing_covering(points, body, packing).ok


@dataclass(frozen=True)
class CoveringBound:
    """|Y| against vol(C + B/2) / vol(B/2)."""
    lhs: int
    rhs: VolumeEstimate
    holds: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs.to_dict(), "holds": self.holds}


def _ratio(num: VolumeEstimate, den: VolumeEstimate) -> VolumeEstimate:
    value = num.value / den.value
    rel = math.hypot(num.std_error / num.value if num.value else 0.0, den.std_error / den.value)
    samples = num.samples + den.samples
    if samples == 0:
        return VolumeEstimate.exact(value)
    return VolumeEstimate(value, value * rel, VolumeMethod.MONTE_CARLO, samples)


def covering_bound_check(
    c_body: SymmetricBody,
    b_body: SymmetricBody,
    packing: Sequence,
    samples: int = 100_000,
    seed: int = 0,
    tol: float = 1e-6,
    steps_per_dim: int = 200,
    block_size: int = 8192,
    workers: int = 1,
) -> CoveringBound:
    """Check |Y| <= vol(C + B/2) / vol(B/2) within three standard errors."""
    if c_body.dim != b_body.dim:
        raise DimensionMismatchError(f"Bodies have dimensions {c_body.dim} and {b_body.dim}")
    half = Fraction(1, 2)
    numerator = minkowski_volume_mc(
        c_body, 1, half, b_body, samples, seed, tol, steps_per_dim, block_size, workers
    )
    denominator = volume(scale_body(b_body, half), samples, seed + 1, block_size, workers)
    rhs = _ratio(numerator, denominator)
    lhs = len(packing)
    holds = lhs <= rhs.value + 3.0 * rhs.std_error
    logger.debug(f"Covering bound: |Y| = {lhs} vs {rhs.value:.4g} +- {rhs.std_error:.2g}")
    return CoveringBound(lhs, rhs, holds)


@dataclass(frozen=True)
class RbmPoint:
    t1: float
    t2: float
    ratio: float
    std_error: float


@dataclass(frozen=True)
class RbmResult:
    """Largest measured vol(t1 C + t2 B)^{1/d} / (t1 vol(C)^{1/d} + t2 vol(B)^{1/d})."""
    value: float
    std_error: float
    points: Tuple[RbmPoint, ...]

    def to_dict(self) -> dict:
        return {
            "c": self.value,
            "std_error": self.std_error,
            "grid": [
                {"t1": p.t1, "t2": p.t2, "ratio": p.ratio, "std_error": p.std_error} for p in self.points
            ],
        }


def rbm_ratio(
    c_body: SymmetricBody,
    b_body: SymmetricBody,
    t_grid: Sequence[Tuple[float, float]],
    samples: int = 100_000,
    seed: int = 0,
    tol: float = 1e-6,
    steps_per_dim: int = 200,
    block_size: int = 8192,
    workers: int = 1,
) -> RbmResult:
    """Empirical reverse Brunn-Minkowski constant over a grid of (t1, t2).

    Raises:
        DomainError: If the grid is empty or the volumes differ by more than
            1e-3 relative plus three combined standard errors.
    """
    if not t_grid:
        raise DomainError("rbm_ratio needs a nonempty (t1, t2) grid")
    if c_body.dim != b_body.dim:
        raise DimensionMismatchError(f"Bodies have dimensions {c_body.dim} and {b_body.dim}")
    d = c_body.dim
    vc = volume(c_body, samples, seed, block_size, workers)
    vb = volume(b_body, samples, seed, block_size, workers)
    slack = 1e-3 * max(vc.value, vb.value) + 3.0 * math.hypot(vc.std_error, vb.std_error)
    if abs(vc.value - vb.value) > slack:
        raise DomainError(f"Volumes differ: vol(C) = {vc.value:.6g}, vol(B) = {vb.value:.6g}")
    base_rel = max(
        vc.std_error / vc.value if vc.value else 0.0,
        vb.std_error / vb.value if vb.value else 0.0,
    )

    points = []
    for k, (t1, t2) in enumerate(t_grid):
        est = minkowski_volume_mc(
            c_body, t1, t2, b_body, samples, seed + 1 + k, tol, steps_per_dim, block_size, workers
        )
        denominator = t1 * vc.value ** (1.0 / d) + t2 * vb.value ** (1.0 / d)
        ratio = est.value ** (1.0 / d) / denominator
        rel = math.hypot(est.std_error / est.value if est.value else 0.0, base_rel) / d
        points.append(RbmPoint(float(t1), float(t2), ratio, ratio * rel))
        logger.debug(f"rbm ({t1}, {t2}): {ratio:.5f} +- {ratio * rel:.2g}")
    worst = max(points, key=lambda p: p.ratio)
    return RbmResult(worst.ratio, worst.std_error, tuple(points))


@dataclass(frozen=True)
class CandidateEvaluation:
    source: CandidateSource
    skipped: bool
    b_count: Optional[int] = None
    y_count: Optional[int] = None
    z_count: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "source": self.source.value,
            "skipped": self.skipped,
            "b_count": self.b_count,
            "y_count": self.y_count,
            "z_count": self.z_count,
        }


@dataclass(frozen=True)
class SurrogateChoice:
    """The selected surrogate body with its packings and lattice points."""
    body: SymmetricBody
    source: CandidateSource
    y: Tuple[IntVector, ...]
    z: Tuple[IntVector, ...]
    b_points: LatticePointSet
    c0_points: LatticePointSet
    evaluations: Tuple[CandidateEvaluation, ...]

    @property
    def y_count(self) -> int:
        return len(self.y)

    @property
    def z_count(self) -> int:
        return len(self.z)


def select_surrogate(
    c_body: SymmetricBody,
    lattice_points: LatticePointSet,
    mc_samples: int = 100_000,
    seed: int = 0,
    candidates: Optional[Sequence[EllipsoidCandidate]] = None,
    target: str = "ellipsoid",
    limit: int = DEFAULT_LIMIT,
    eps: float = 1e-3,
    max_iterations: int = 10_000,
    samples_per_dim: int = 1000,
    snap_bits: int = 48,
    workers: int = 1,
) -> SurrogateChoice:
    """Pick the candidate minimizing |Y|*|Z| (then |Y|, then candidate order).

    Y packs ``lattice_points`` (C ∩ Z^d, possibly center-shifted) with the
    candidate B; Z packs B ∩ Z^d with C. Candidates whose enumeration hits
    ``limit`` are skipped.

    Raises:
        TruncationError: If C ∩ Z^d is truncated or every candidate was skipped.
    """
    if lattice_points.truncated:
        raise TruncationError("C ∩ Z^d is truncated", partial=lattice_points, limit=limit)
    c0_points = enumerate_lattice(c_body, None, limit)
    if c0_points.truncated:
        raise TruncationError("Origin-centered C ∩ Z^d is truncated", partial=c0_points, limit=limit)
    if candidates is None:
        candidates = candidate_ellipsoids(
            c_body, c0_points.points, mc_samples, seed, eps, max_iterations, samples_per_dim, snap_bits
        )
    if target == "skew":
        target_vol = volume(c_body, mc_samples, seed).value
        bodies = [(c.source, skew_from_ellipsoid(c.ellipsoid, target_vol, snap_bits)) for c in candidates]
    elif target == "ellipsoid":
        bodies = [(c.source, c.ellipsoid) for c in candidates]
    else:
        raise DomainError(f"Unknown surrogate target: {target}")

    def evaluate(item):
        source, body = item
        b_points = enumerate_lattice(body, None, limit)
        if b_points.truncated:
            logger.warning(f"Skipping {source.value} candidate: B ∩ Z^d exceeds {limit} points")
            return CandidateEvaluation(source, True), None
        y = greedy_packing(lattice_points, body)
        z = greedy_packing(b_points, c_body)
        logger.debug(f"{source.value}: |B∩Z^d| = {b_points.count}, |Y| = {len(y)}, |Z| = {len(z)}")
        return CandidateEvaluation(source, False, b_points.count, len(y), len(z)), (body, y, z, b_points)

    if workers > 1 and len(bodies) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(evaluate, bodies))
    else:
        results = [evaluate(item) for item in bodies]

    evaluations = tuple(evaluation for evaluation, _ in results)
    scored = [
        ((len(res[1]) * len(res[2]), len(res[1]), index), index)
        for index, (_, res) in enumerate(results)
        if res is not None
    ]
    if not scored:
        raise TruncationError(f"Every surrogate candidate exceeded the enumeration limit {limit}", limit=limit)
    best = min(scored)[1]
    body, y, z, b_points = results[best][1]
    source = bodies[best][0]
    logger.info(f"Selected {source.value} surrogate: |Y| = {len(y)}, |Z| = {len(z)}")
    return SurrogateChoice(body, source, tuple(y), tuple(z), b_points, c0_points, evaluations)


@dataclass
class TransferReport:
    """Everything the transfer pipeline measured and verified."""
    surrogate: SymmetricBody
    surrogate_source: CandidateSource
    y: List[IntVector]
    z: List[IntVector]
    p_prime: Progression
    x_prime: FiniteSet
    counts: Dict[str, int]
    ratios: Dict[str, Union[Fraction, float]]
    verified: bool
    failures: List[dict] = field(default_factory=list)
    covering_bounds: Dict[str, CoveringBound] = field(default_factory=dict)
    rbm: Optional[RbmResult] = None
    evaluations: Tuple[CandidateEvaluation, ...] = ()

    def to_dict(self) -> dict:
        return {
            "verified": self.verified,
            "failures": self.failures,
            "surrogate": {"source": self.surrogate_source.value, "body": self.surrogate.to_dict()},
            "Y": [list(y) for y in self.y],
            "Z": [list(z) for z in self.z],
            "P_prime": self.p_prime.to_dict(),
            "X_prime": self.x_prime.to_dict(),
            "counts": self.counts,
            "ratios": {
                k: rq.format_fraction(v) if isinstance(v, Fraction) else v for k, v in self.ratios.items()
            },
            "covering_bounds": {k: v.to_dict() for k, v in self.covering_bounds.items()},
            "rbm": self.rbm.to_dict() if self.rbm else None,
            "candidates": [e.to_dict() for e in self.evaluations],
        }


def transfer_pipeline(
    a_set: FiniteSet,
    p: Progression,
    x_set: FiniteSet,
    config: Optional[Config] = None,
) -> TransferReport:
    """Turn A ⊆ P + X into A ⊆ P' + X' with P' over an equal-volume surrogate.

    Raises:
        CoverError: If A is not covered by P + X to begin with.
        TruncationError: If an enumeration hits the configured limit.
    """
    cfg = config or Config()
    limit = cfg.enumeration.limit
    mc = cfg.monte_carlo
    fit = cfg.fitting
    mink = cfg.minkowski

    cover = verify_cover(a_set, p, x_set, limit)
    if not cover.ok:
        raise CoverError("A is not covered by P + X", witness=cover.witness)

    c_body = p.body
    d = c_body.dim
    c_points = enumerate_lattice(c_body, p.center, limit)
    if c_points.truncated:
        raise TruncationError("C ∩ Z^d is truncated", partial=c_points, limit=limit)

    choice = select_surrogate(
        c_body,
        c_points,
        mc.samples,
        mc.seed,
        target=cfg.transfer.target,
        limit=limit,
        eps=fit.eps,
        max_iterations=fit.max_iterations,
        samples_per_dim=fit.samples_per_dim,
        snap_bits=fit.snap_bits,
        workers=mc.workers,
    )
    b_body = choice.body

    # P' keeps P's center when it is integral; y - c' absorbs the shift
    c_prime = p.center if rq.is_integral(p.center) else tuple(Fraction(0) for _ in range(d))
    kind = ProgressionKind.SKEW if cfg.transfer.target == "skew" else ProgressionKind.ELLIPSOID
    p_prime = Progression(p.frame, b_body, tuple(c_prime), kind)
    shifts = [p.frame.linear(rq.sub(y, c_prime)) for y in choice.y]
    group = x_set.group.join(p.frame.group)
    x_prime = FiniteSet.of(group, (rq.add(x, s) for x in x_set for s in shifts))

    failures: List[dict] = []
    y_check = check_packing_covering(c_points, b_body, choice.y)
    if not y_check.ok:
        failures.append({"check": "Y", **y_check.to_dict()})
    z_check = check_packing_covering(choice.b_points, c_body, choice.z)
    if not z_check.ok:
        failures.append({"check": "Z", **z_check.to_dict()})
    new_cover = verify_cover(a_set, p_prime, x_prime, limit)
    if not new_cover.ok:
        failures.append({"check": "cover", **new_cover.to_dict()})
    if len(x_prime) > len(x_set) * len(choice.y):
        failures.append({"check": "x_prime_count", "ok": False})
    if choice.b_points.count > len(choice.z) * choice.c0_points.count:
        failures.append({"check": "b_count", "ok": False})
    verified = not failures
    if not verified:
        logger.error(f"Transfer verification failed: {[f['check'] for f in failures]}")

    counts = {
        "C": c_points.count,
        "C0": choice.c0_points.count,
        "B": choice.b_points.count,
        "Y": len(choice.y),
        "Z": len(choice.z),
        "X": len(x_set),
        "X_prime": len(x_prime),
        "A": len(a_set),
    }
    ratios: Dict[str, Union[Fraction, float]] = {
        "B_over_C": Fraction(choice.b_points.count, c_points.count) if c_points.count else Fraction(0),
        "implied_c_Y": len(choice.y) ** (1.0 / d) / 3.0,
        "implied_c_Z": len(choice.z) ** (1.0 / d) / 3.0,
    }

    report = TransferReport(
        surrogate=b_body,
        surrogate_source=choice.source,
        y=list(choice.y),
        z=list(choice.z),
        p_prime=p_prime,
        x_prime=x_prime,
        counts=counts,
        ratios=ratios,
        verified=verified,
        failures=failures,
        evaluations=choice.evaluations,
    )

    if cfg.transfer.check_volume_bounds:
        common = dict(
            samples=mc.samples,
            tol=mink.tol,
            steps_per_dim=mink.steps_per_dim,
            block_size=mc.block_size,
            workers=mc.workers,
        )
        report.covering_bounds["Y"] = covering_bound_check(c_body, b_body, choice.y, seed=mc.seed + 2, **common)
        report.covering_bounds["Z"] = covering_bound_check(b_body, c_body, choice.z, seed=mc.seed + 4, **common)
        for name, bound in report.covering_bounds.items():
            if not bound.holds:
                logger.warning(f"Covering bound for {name} fails: {bound.lhs} > {bound.rhs.value:.4g}")

    if cfg.transfer.rbm_grid:
        report.rbm = rbm_ratio(
            c_body,
            b_body,
            cfg.transfer.rbm_grid,
            mc.samples,
            mc.seed,
            mink.tol,
            mink.steps_per_dim,
            mc.block_size,
            mc.workers,
        )

    logger.info(
        f"Transfer {'verified' if verified else 'FAILED'}: |Y| = {counts['Y']}, |Z| = {counts['Z']}, "
        f"|X'| = {counts['X_prime']}"
    )
    return report
