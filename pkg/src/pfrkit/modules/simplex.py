"""Exact rational simplex with Bland's rule and lexicographic objectives.

Only the form needed by pfrkit is supported:

    maximize (lexicographically)  c_1 . z, c_2 . z, ...
    subject to                    A z <= b,  z >= 0,  b >= 0

so the all-slack basis (z = 0) is feasible and no phase one is needed.
"""

from fractions import Fraction
from typing import List, Sequence, Tuple

from loguru import logger

from ..core.errors import DomainError, InternalError


def _lex_positive(values: Sequence[Fraction]) -> bool:
    for v in values:
        if v > 0:
            return True
        if v < 0:
            return False
    return False


def maximize(
    a: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    costs: Sequence[Sequence[Fraction]],
) -> Tuple[List[Fraction], List[Fraction]]:
    """Solve the LP above exactly.

    Args:
        a: m x n constraint matrix.
        b: Right-hand side, all entries >= 0.
        costs: One or more objective rows of length n, in priority order.

    Returns:
        Tuple of (optimal z, objective values per cost row).

    Raises:
        DomainError: If b has a negative entry.
        InternalError: If the LP is unbounded.
    """
    m = len(a)
    n = len(costs[0])
    if any(v < 0 for v in b):
        raise DomainError("Initial slack basis must be feasible (b >= 0)")

    # Tableau rows: [a_i | e_i | b_i]
    tableau = [
        [Fraction(x) for x in a[i]] + [Fraction(int(i == j)) for j in range(m)] + [Fraction(b[i])]
        for i in range(m)
    ]
    reduced = [[Fraction(x) for x in row] + [Fraction(0)] * m for row in costs]
    basis = list(range(n, n + m))
    width = n + m
    pivots = 0

    while True:
        # Bland: lowest-index column with a lexicographically positive reduced cost
        entering = next(
            (j for j in range(width) if _lex_positive([row[j] for row in reduced])),
            None,
        )
        if entering is None:
            break

        best = None
        for i in range(m):
            coef = tableau[i][entering]
            if coef > 0:
                key = (tableau[i][-1] / coef, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise InternalError("LP is unbounded over a body that should be bounded")

        r = best[1]
        pivot = tableau[r][entering]
        tableau[r] = [x / pivot for x in tableau[r]]
        for i in range(m):
            f = tableau[i][entering]
            if i != r and f != 0:
                tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[r])]
        for row in reduced:
            f = row[entering]
            if f != 0:
                pivot_row = tableau[r]
                for j in range(width):
                    row[j] -= f * pivot_row[j]
        basis[r] = entering
        pivots += 1

    z = [Fraction(0)] * width
    for i, var in enumerate(basis):
        z[var] = tableau[i][-1]
    solution = z[:n]
    values = [sum((Fraction(c) * x for c, x in zip(row, solution)), Fraction(0)) for row in costs]
    logger.debug(f"Simplex finished after {pivots} pivots")
    return solution, values
