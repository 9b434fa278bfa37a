"""Exception hierarchy shared by every pfrkit module."""

from typing import Any, Optional


class PfrError(Exception):
    """Base class for all pfrkit errors."""


class DomainError(PfrError, ValueError):
    """Input violates an operation's preconditions."""


class DimensionMismatchError(DomainError):
    """Vectors, bodies or frames disagree on dimension."""


class NotPositiveDefiniteError(DomainError):
    """A Gram matrix failed the exact LDL^T pivot test."""


class RankDeficientError(DomainError):
    """Forms or points do not span the space."""


class GroupMismatchError(DomainError):
    """Two finite sets live in different ambient groups."""


class TruncationError(PfrError):
    """An enumeration hit its point limit.

    Attributes:
        partial: Whatever was produced before the limit was hit.
        limit: The limit that was exceeded.
    """

    def __init__(self, message: str, partial: Any = None, limit: Optional[int] = None):
        super().__init__(message)
        self.partial = partial
        self.limit = limit


class SamplingError(PfrError):
    """Monte Carlo sampling could not produce a usable estimate."""


class CoverError(PfrError):
    """A set is not covered by P + X.

    Attributes:
        witness: The first uncovered group element.
    """

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class VerificationError(PfrError):
    """An exact packing/covering verification failed."""

    def __init__(self, message: str, witness: Any = None, reason: str = ""):
        super().__init__(message)
        self.witness = witness
        self.reason = reason


class InternalError(PfrError):
    """Invariant breach inside pfrkit (e.g. an LP over a bounded body reported unbounded)."""
