"""Exact dense linear solving over rationals.

The solvers in this package reduce zero-cost cycles to square systems
with Fraction entries. Floating point is never acceptable there, so this
module does plain Gaussian elimination with partial (first-nonzero)
pivoting on exact rationals. Systems stay small: one row per state in a
zero-cost strongly connected region.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SingularMatrixError

__all__ = ["solve_linear_system"]


def solve_linear_system(
    matrix: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly.

    Args:
        matrix: square coefficient matrix; rows are copied, inputs untouched.
        rhs: right-hand side of matching length.

    Returns:
        The unique solution vector.

    Raises:
        SingularMatrixError: if the matrix has no unique solution.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("matrix must be square and match the rhs length")
    rows = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]

    for col in range(n):
        pivot_row = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
        pivot = rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] / pivot
            if factor == 0:
                continue
            row = rows[r]
            lead = rows[col]
            row[col] = Fraction(0)
            for c in range(col + 1, n + 1):
                if lead[c]:
                    row[c] -= factor * lead[c]

    solution = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = rows[r][n]
        row = rows[r]
        for c in range(r + 1, n):
            if row[c]:
                acc -= row[c] * solution[c]
        solution[r] = acc / row[r]
    return solution
