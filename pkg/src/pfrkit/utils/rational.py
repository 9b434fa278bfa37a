"""Exact rational vectors and matrices built on fractions.Fraction."""

from fractions import Fraction
from math import isqrt
from numbers import Rational
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from ..core.errors import DimensionMismatchError, DomainError, NotPositiveDefiniteError

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]
RationalLike = Union[Fraction, int, str, float]

_SQRT_SCALE = 2 ** 32


def to_fraction(value: RationalLike) -> Fraction:
    """Convert a scalar to an exact Fraction.

    Strings use the "p/q" (or plain integer / decimal) notation; floats are
    converted exactly.

    Raises:
        DomainError: If the value cannot be read as a rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"Not a rational: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, np.integer):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise DomainError(f"Not a finite number: {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"Invalid rational string {value!r}: {e}") from e
    raise DomainError(f"Not a rational: {value!r}")


def format_fraction(value: RationalLike) -> str:
    """Render a rational as a "p/q" string (denominator always present)."""
    q = to_fraction(value)
    return f"{q.numerator}/{q.denominator}"


def vector(values: Iterable[RationalLike]) -> Vector:
    return tuple(to_fraction(v) for v in values)


def matrix(rows: Iterable[Iterable[RationalLike]]) -> Matrix:
    """Build an exact matrix, checking that it is rectangular."""
    result = tuple(vector(r) for r in rows)
    if result and any(len(r) != len(result[0]) for r in result):
        raise DimensionMismatchError("Matrix rows have different lengths")
    return result


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def diagonal(entries: Sequence[RationalLike]) -> Matrix:
    diag = vector(entries)
    n = len(diag)
    return tuple(tuple(diag[i] if i == j else Fraction(0) for j in range(n)) for i in range(n))


def check_dim(x: Sequence, d: int, what: str = "vector") -> None:
    if len(x) != d:
        raise DimensionMismatchError(f"{what} has dimension {len(x)}, expected {d}")


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    check_dim(v, len(u))
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    check_dim(v, len(u))
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    check_dim(v, len(u))
    return tuple(a - b for a, b in zip(u, v))


def scale(u: Sequence[Fraction], t: RationalLike) -> Vector:
    t = to_fraction(t)
    return tuple(a * t for a in u)


def neg(u: Sequence[Fraction]) -> Vector:
    return tuple(-a for a in u)


def mat_vec(m: Matrix, x: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, x) for row in m)


def transpose(m: Matrix) -> Matrix:
    if not m:
        return ()
    return tuple(tuple(m[i][j] for i in range(len(m))) for j in range(len(m[0])))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mat_scale(m: Matrix, t: RationalLike) -> Matrix:
    t = to_fraction(t)
    return tuple(tuple(x * t for x in row) for row in m)


def quad_form(g: Matrix, x: Sequence[Fraction]) -> Fraction:
    """Return x^T g x exactly."""
    check_dim(x, len(g))
    total = Fraction(0)
    for i, xi in enumerate(x):
        if xi:
            total += xi * dot(g[i], x)
    return total


def is_symmetric(m: Matrix) -> bool:
    n = len(m)
    return all(len(row) == n for row in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n)
    )


def ldl(g: Matrix) -> Tuple[Matrix, Vector]:
    """Exact LDL^T factorization of a symmetric matrix.

    Returns (L, D) with L unit lower triangular, so that
    x^T g x = sum_j D[j] * (x_j + sum_{i>j} L[i][j] x_i)^2.

    Raises:
        NotPositiveDefiniteError: If g is not symmetric or a pivot is <= 0.
    """
    n = len(g)
    if not is_symmetric(g):
        raise NotPositiveDefiniteError("Gram matrix is not symmetric")
    lower = [[Fraction(0)] * n for _ in range(n)]
    pivots = [Fraction(0)] * n
    for j in range(n):
        lower[j][j] = Fraction(1)
        pivot = g[j][j] - sum((lower[j][k] ** 2 * pivots[k] for k in range(j)), Fraction(0))
        if pivot <= 0:
            raise NotPositiveDefiniteError(f"LDL^T pivot {j} is {pivot}, matrix is not positive definite")
        pivots[j] = pivot
        for i in range(j + 1, n):
            acc = g[i][j] - sum(
                (lower[i][k] * lower[j][k] * pivots[k] for k in range(j)), Fraction(0)
            )
            lower[i][j] = acc / pivot
    return tuple(tuple(r) for r in lower), tuple(pivots)


def is_positive_definite(g: Matrix) -> bool:
    try:
        ldl(g)
    except NotPositiveDefiniteError:
        return False
    return True


def _row_reduce(rows: list, ncols: int) -> Tuple[list, list]:
    """Gauss-Jordan elimination in place; returns (rows, pivot columns)."""
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivot_cols


def rank(m: Matrix) -> int:
    if not m:
        return 0
    _, pivots = _row_reduce([list(r) for r in m], len(m[0]))
    return len(pivots)


def determinant(m: Matrix) -> Fraction:
    n = len(m)
    rows = [list(r) for r in m]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[c][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def inverse(m: Matrix) -> Matrix:
    """Exact inverse of a square matrix.

    Raises:
        DomainError: If the matrix is singular.
    """
    n = len(m)
    aug = [list(m[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rows, pivots = _row_reduce(aug, n)
    if len(pivots) != n:
        raise DomainError("Matrix is singular")
    return tuple(tuple(rows[i][n:]) for i in range(n))


def solve(m: Matrix, b: Sequence[Fraction]) -> Vector:
    return mat_vec(inverse(m), b)


def sqrt_bounds(q: RationalLike) -> Tuple[Fraction, Fraction]:
    """Rational (lower, upper) bounds on sqrt(q); equal when q is a rational square."""
    q = to_fraction(q)
    if q < 0:
        raise DomainError(f"Square root of negative value {q}")
    p, r = q.numerator, q.denominator
    s = isqrt(p * r)
    if s * s == p * r:
        exact = Fraction(s, r)
        return exact, exact
    scaled = isqrt(p * r * _SQRT_SCALE * _SQRT_SCALE)
    return Fraction(scaled, r * _SQRT_SCALE), Fraction(scaled + 1, r * _SQRT_SCALE)


def sqrt_upper(q: RationalLike) -> Fraction:
    return sqrt_bounds(q)[1]


def snap(x: float, bits: int = 48) -> Fraction:
    """Round a float to the nearest rational with denominator 2**bits."""
    den = 1 << bits
    return Fraction(int(round(float(x) * den)), den)


def snap_matrix(m: np.ndarray, bits: int = 48, symmetric: bool = True) -> Matrix:
    """Snap a float matrix to rationals with common denominator 2**bits."""
    arr = np.asarray(m, dtype=float)
    if symmetric:
        arr = (arr + arr.T) / 2.0
    return tuple(tuple(snap(v, bits) for v in row) for row in arr)


def to_float_array(m: Union[Matrix, Sequence[Sequence[RationalLike]]]) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def is_integral(x: Sequence[Fraction]) -> bool:
    return all(to_fraction(v).denominator == 1 for v in x)


def as_int_tuple(x: Sequence[RationalLike]) -> Tuple[int, ...]:
    """Convert an integral rational vector to a tuple of ints."""
    out = []
    for v in x:
        q = to_fraction(v)
        if q.denominator != 1:
            raise DomainError(f"Expected an integer coordinate, got {q}")
        out.append(q.numerator)
    return tuple(out)
