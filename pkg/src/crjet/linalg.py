"""Exact linear algebra over the rationals and Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction

from .scalars import ExactComplex


class RankTracker:
    """Incremental row reduction over ExactComplex.

    Rows are reduced against the accumulated echelon basis; a row that adds
    new rank is kept together with its label (used for pivot certificates).
    """

    def __init__(self, width: int):
        self.width = width
        self.rows = []      # echelon rows: (pivot_col, row)
        self.labels = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add_row(self, vec, label=None) -> bool:
        vec = list(ExactComplex.coerce(c) for c in vec)
        for pivot_col, row in self.rows:
            c = vec[pivot_col]
            if not c.is_zero():
                vec = [a - c * b for a, b in zip(vec, row)]
        for j, c in enumerate(vec):
            if not c.is_zero():
                inv = c.inverse()
                vec = [a * inv for a in vec]
                # keep the basis fully reduced so later candidates need one pass
                self.rows = [
                    (pc, [a - row[j] * b for a, b in zip(row, vec)] if not row[j].is_zero() else row)
                    for pc, row in self.rows
                ]
                self.rows.append((j, vec))
                self.labels.append(label)
                return True
        return False


def solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Solve A x = b exactly over Q.

    Returns (solution, free_columns) with free variables pinned to 0, or
    raises InconsistentSystem when no solution exists.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, m):
            if A[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        A[row], A[sel] = A[sel], A[row]
        inv = Fraction(1) / A[row][col]
        A[row] = [a * inv for a in A[row]]
        for r in range(m):
            if r != row and A[r][col] != 0:
                c = A[r][col]
                A[r] = [a - c * b for a, b in zip(A[r], A[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if A[r][n] != 0:
            raise InconsistentSystem("linear system has no solution")
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = A[r][n]
    free = [c for c in range(n) if c not in pivots]
    return x, free


class InconsistentSystem(ArithmeticError):
    pass
