"""Exact rational linear algebra: Gaussian elimination over Fraction."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularSystemError(ValueError):
    """A linear system expected to be uniquely solvable is not."""


def solve_square(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]]):
    """Solve A X = B exactly for square A; raises SingularSystemError.

    ``B`` is given column-major friendly as rows; returns X as list of rows.
    """
    n = len(A)
    m = len(B[0]) if n else 0
    aug = [list(A[r]) + list(B[r]) for r in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError(f"no pivot in column {col}")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        if pv != 1:
            aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:n + m] for row in aug]


def solve_unique(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """Solve the (possibly rectangular) system A x = b.

    The system must be consistent and determine every unknown; otherwise
    SingularSystemError is raised.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    aug = [list(A[r]) + [b[r]] for r in range(rows)]
    pivots: list[tuple[int, int]] = []
    r0 = 0
    for col in range(cols):
        pivot = next((r for r in range(r0, rows) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        if pivot != r0:
            aug[r0], aug[pivot] = aug[pivot], aug[r0]
        pv = aug[r0][col]
        if pv != 1:
            aug[r0] = [v / pv for v in aug[r0]]
        for r in range(rows):
            if r != r0 and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * c for a, c in zip(aug[r], aug[r0])]
        pivots.append((r0, col))
        r0 += 1
        if r0 == rows:
            break
    for r in range(r0, rows):
        if aug[r][cols] != 0:
            raise SingularSystemError("inconsistent linear system")
    if len(pivots) != cols:
        raise SingularSystemError("underdetermined linear system")
    x = [Fraction(0)] * cols
    for r, col in pivots:
        x[col] = aug[r][cols]
    return x


def rank(A: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(r) for r in A]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rk = 0
    for col in range(ncols):
        pivot = next((r for r in range(rk, nrows) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rk], rows[pivot] = rows[pivot], rows[rk]
        pv = rows[rk][col]
        rows[rk] = [v / pv for v in rows[rk]]
        for r in range(nrows):
            if r != rk and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * c for a, c in zip(rows[r], rows[rk])]
        rk += 1
        if rk == nrows:
            break
    return rk
