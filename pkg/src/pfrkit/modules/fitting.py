"""Candidate ellipsoids for a symmetric body: MVEE and second-moment fits."""

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import List, Sequence, Union

import numpy as np
from loguru import logger

from ..core.errors import DomainError, RankDeficientError, SamplingError
from ..utils import rational as rq
from ..utils.rational import Matrix, RationalLike
from ..utils.rng import substream
from .bodies import SymmetricBody, bounding_box, volume

MIN_ACCEPTANCE = 1e-6
_BOUNDARY_MARGIN = 1e-10


class CandidateSource(str, Enum):
    SELF = "Self"
    MVEE = "MVEE"
    INERTIA = "Inertia"
    LATTICE_INERTIA = "LatticeInertia"


@dataclass(frozen=True)
class EllipsoidCandidate:
    """A fitted ellipsoid together with where it came from."""
    ellipsoid: SymmetricBody
    source: CandidateSource
    fit_tolerance: float

    def __post_init__(self):
        if not self.ellipsoid.is_ellipsoid:
            raise DomainError("Candidate body must be an ellipsoid")
        if self.fit_tolerance <= 0:
            raise DomainError("fit_tolerance must be positive")

    def to_dict(self) -> dict:
        return {
            "source": self.source.value,
            "fit_tolerance": self.fit_tolerance,
            "body": self.ellipsoid.to_dict(),
        }


def _is_exact(samples: Sequence[Sequence]) -> bool:
    return all(
        isinstance(v, (Fraction, int, np.integer)) and not isinstance(v, bool)
        for row in samples
        for v in row
    )


def mvee(
    points: Sequence[Sequence[RationalLike]],
    eps: float = 1e-3,
    max_iterations: int = 10_000,
    snap_bits: int = 48,
) -> EllipsoidCandidate:
    """Minimum-volume origin-centered ellipsoid around +-points (Khachiyan).

    The float fit is snapped to rationals and then scaled, exactly, so that
    every input point satisfies x^T gram x <= 1.

    Raises:
        DomainError: If eps <= 0.
        RankDeficientError: If the points do not span R^d.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    exact_points = [rq.vector(p) for p in points]
    if not exact_points:
        raise RankDeficientError("MVEE needs at least d points")
    d = len(exact_points[0])
    base = rq.to_float_array(exact_points)
    if base.shape[1] != d or np.linalg.matrix_rank(base) < d:
        raise RankDeficientError("MVEE points do not span R^d")

    pts = np.vstack([base, -base])
    n = len(pts)
    u = np.full(n, 1.0 / n)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        moment = pts.T @ (u[:, None] * pts)
        lev = np.einsum("ij,ij->i", pts @ np.linalg.inv(moment), pts)
        j = int(np.argmax(lev))
        m_j = lev[j]
        if m_j <= d * (1.0 + eps):
            break
        step = (m_j - d) / (d * (m_j - 1.0))
        u *= 1.0 - step
        u[j] += step
    else:
        logger.warning(f"MVEE stopped at max_iterations={max_iterations} before reaching eps={eps}")

    moment = pts.T @ (u[:, None] * pts)
    gram = rq.snap_matrix(np.linalg.inv(moment) / d, snap_bits)
    worst = max(rq.quad_form(gram, p) for p in exact_points)
    if worst > 1:
        gram = rq.mat_scale(gram, 1 / worst)
    logger.debug(f"MVEE converged after {iterations} iterations (d={d}, n={n})")
    return EllipsoidCandidate(SymmetricBody.ellipsoid(gram), CandidateSource.MVEE, eps)


def second_moment(samples: Sequence[Sequence]) -> Union[Matrix, np.ndarray]:
    """mean(x x^T): exact rational for int/Fraction input, float otherwise."""
    if len(samples) == 0:
        raise DomainError("second_moment needs at least one sample")
    if _is_exact(samples):
        vecs = [rq.vector(s) for s in samples]
        d = len(vecs[0])
        n = len(vecs)
        return tuple(
            tuple(sum((v[i] * v[j] for v in vecs), Fraction(0)) / n for j in range(d))
            for i in range(d)
        )
    arr = np.asarray(samples, dtype=float)
    return arr.T @ arr / len(arr)


def inertia_ellipsoid(
    samples: Sequence[Sequence],
    source: CandidateSource = CandidateSource.INERTIA,
    snap_bits: int = 48,
    fit_tolerance: float = 1e-3,
) -> EllipsoidCandidate:
    """Ellipsoid with gram = M^{-1} / (d + 2), M the second-moment matrix.

    For uniform samples of an ellipsoid E this recovers E itself; the scale is
    normally reset afterwards by equalize_volume.

    Raises:
        DomainError: If fewer than 10*d^2 samples are given.
        RankDeficientError: If the samples do not span R^d.
    """
    if len(samples) == 0:
        raise DomainError("inertia_ellipsoid needs samples")
    d = len(samples[0])
    if len(samples) < 10 * d * d:
        raise DomainError(f"inertia_ellipsoid needs >= {10 * d * d} samples, got {len(samples)}")
    moment = second_moment(samples)
    if isinstance(moment, np.ndarray):
        if np.linalg.matrix_rank(moment) < d:
            raise RankDeficientError("Second-moment matrix is singular")
        gram = rq.snap_matrix(np.linalg.inv(moment) / (d + 2), snap_bits)
    else:
        if rq.rank(moment) < d:
            raise RankDeficientError(f"Lattice points span fewer than {d} dimensions")
        gram = rq.mat_scale(rq.inverse(moment), Fraction(1, d + 2))
    return EllipsoidCandidate(SymmetricBody.ellipsoid(gram), source, fit_tolerance)


def equalize_volume(
    candidate: Union[EllipsoidCandidate, SymmetricBody],
    target_vol: float,
) -> SymmetricBody:
    """Rescale an ellipsoid so that its volume is ``target_vol``."""
    if target_vol <= 0:
        raise DomainError(f"Target volume must be positive, got {target_vol}")
    body = candidate.ellipsoid if isinstance(candidate, EllipsoidCandidate) else candidate
    if not body.is_ellipsoid:
        raise DomainError("equalize_volume needs an ellipsoid")
    current = volume(body).value
    factor = (current / target_vol) ** (2.0 / body.dim)
    if factor == 1.0:
        return body
    return SymmetricBody.ellipsoid(rq.mat_scale(body.gram, Fraction(factor)))


def uniform_sample(
    body: SymmetricBody,
    n: int,
    seed: int = 0,
    block_size: int = 8192,
) -> np.ndarray:
    """n points uniform in the body, by rejection from its bounding box.

    Raises:
        SamplingError: If the acceptance rate falls below 1e-6.
    """
    if n < 1:
        raise DomainError("uniform_sample needs n >= 1")
    radii = np.array([float(r) for r in bounding_box(body)])
    accepted: List[np.ndarray] = []
    total = drawn = 0
    block = 0
    while total < n:
        pts = substream(seed, block).uniform(-radii, radii, size=(block_size, body.dim))
        block += 1
        drawn += block_size
        inside = pts[body.gauge_values(pts) <= 1.0 - _BOUNDARY_MARGIN]
        accepted.append(inside)
        total += len(inside)
        if drawn >= 1_000_000 and total < MIN_ACCEPTANCE * drawn:
            raise SamplingError(
                f"Rejection acceptance {total / drawn:.2e} below {MIN_ACCEPTANCE:g} (d={body.dim}); reduce d"
            )
    return np.vstack(accepted)[:n]


def candidate_ellipsoids(
    body: SymmetricBody,
    lattice_points: Sequence[Sequence[RationalLike]] = (),
    mc_samples: int = 100_000,
    seed: int = 0,
    eps: float = 1e-3,
    max_iterations: int = 10_000,
    samples_per_dim: int = 1000,
    snap_bits: int = 48,
) -> List[EllipsoidCandidate]:
    """Equal-volume ellipsoid candidates for ``body``, in a fixed order.

    Order: Self (if the body is an ellipsoid), MVEE over uniform samples and
    lattice points, Inertia of uniform samples, LatticeInertia (if there are
    at least 10*d^2 lattice points spanning R^d). ``lattice_points`` are
    origin-centered.
    """
    d = body.dim
    target = volume(body, mc_samples, seed).value
    logger.debug(f"Candidate target volume {target:.6g} (d={d})")
    candidates: List[EllipsoidCandidate] = []
    if body.is_ellipsoid:
        candidates.append(EllipsoidCandidate(body, CandidateSource.SELF, eps))

    samples = uniform_sample(body, samples_per_dim * d, seed + 1)
    hull_proxy = [list(map(Fraction, row)) for row in samples.tolist()]
    hull_proxy.extend(rq.vector(p) for p in lattice_points)
    candidates.append(mvee(hull_proxy, eps, max_iterations, snap_bits))

    if len(samples) >= 10 * d * d:
        candidates.append(inertia_ellipsoid(samples.tolist(), CandidateSource.INERTIA, snap_bits, eps))
    else:
        logger.warning(f"Skipping Inertia candidate: {len(samples)} samples < {10 * d * d}")

    if len(lattice_points) >= 10 * d * d:
        exact = [rq.vector(p) for p in lattice_points]
        try:
            candidates.append(inertia_ellipsoid(exact, CandidateSource.LATTICE_INERTIA, snap_bits, eps))
        except RankDeficientError:
            logger.warning(f"Skipping LatticeInertia candidate: {len(exact)} lattice points do not span R^{d}")

    out = []
    for cand in candidates:
        if cand.source == CandidateSource.SELF:
            out.append(cand)
            continue
        out.append(replace(cand, ellipsoid=equalize_volume(cand, target)))
    logger.info(f"Built {len(out)} candidate ellipsoids: {[c.source.value for c in out]}")
    return out


def gram_anisotropy(body: SymmetricBody) -> float:
    """Ratio of the largest to the smallest eigenvalue of the Gram matrix."""
    eig = np.linalg.eigvalsh(body.float_matrix)
    return float(eig[-1] / eig[0])


def frobenius_shape_error(a: SymmetricBody, b: SymmetricBody) -> float:
    """Relative Frobenius distance between the trace-normalized Gram matrices."""
    ga, gb = a.float_matrix, b.float_matrix
    ga = ga / np.trace(ga)
    gb = gb / np.trace(gb)
    return float(np.linalg.norm(ga - gb) / np.linalg.norm(gb))


def skew_from_ellipsoid(body: SymmetricBody, target_vol: float, snap_bits: int = 48) -> SymmetricBody:
    """Parallelepiped {v : |(L^T v)_i| <= 1} for gram = L L^T, rescaled to volume ``target_vol``."""
    if target_vol <= 0:
        raise DomainError(f"Target volume must be positive, got {target_vol}")
    if not body.is_ellipsoid:
        raise DomainError("skew_from_ellipsoid needs an ellipsoid")
    chol = np.linalg.cholesky(body.float_matrix)
    forms = rq.snap_matrix(chol.T, snap_bits, symmetric=False)
    det = abs(rq.determinant(forms))
    if det == 0:
        raise RankDeficientError("Snapped parallelepiped forms are singular")
    d = body.dim
    factor = (2.0 ** d / (target_vol * float(det))) ** (1.0 / d)
    return SymmetricBody.polytope(rq.mat_scale(forms, Fraction(factor)))
