"""Exact rational linear algebra: rank, span membership, and elimination with
symbolic right-hand sides."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import flint

from .symexpr import RationalExpr


def _mat(rows: Sequence[Sequence]) -> flint.fmpq_mat:
    rows = [list(r) for r in rows]
    if not rows:
        return flint.fmpq_mat(0, 0)
    ncols = len(rows[0])
    entries = []
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        for c in r:
            c = Fraction(c)
            entries.append(flint.fmpq(c.numerator, c.denominator))
    return flint.fmpq_mat(len(rows), ncols, entries)


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return _mat(rows).rank()


def in_span(rows: Sequence[Sequence], v: Sequence) -> bool:
    """True iff v is a rational combination of ``rows``."""
    if not any(Fraction(c) for c in v):
        return True
    if not rows:
        return False
    return rank(list(rows) + [v]) == rank(rows)


class Span:
    """Row space of a rational matrix, reduced once for repeated membership tests."""

    def __init__(self, rows: Sequence[Sequence]):
        self.basis: list[tuple[int, list[Fraction]]] = []
        if not rows:
            self.rank = 0
            return
        red, self.rank = _mat(rows).rref()
        ncols = red.ncols()
        for r in range(self.rank):
            row = [Fraction(int(red[r, c].p), int(red[r, c].q)) for c in range(ncols)]
            pivot = next(c for c, x in enumerate(row) if x != 0)
            self.basis.append((pivot, row))

    def contains(self, v: Sequence) -> bool:
        v = [Fraction(c) for c in v]
        for pivot, row in self.basis:
            f = v[pivot]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
        return not any(v)


class InconsistentSystemError(ArithmeticError):
    def __init__(self, message: str, residuals: list):
        super().__init__(message)
        self.residuals = residuals


def solve_symbolic(matrix: Sequence[Sequence], rhs: Sequence[RationalExpr]) -> list[RationalExpr]:
    """Solve M z = b for a square-or-tall rational M of full column rank.

    The right-hand sides are expressions.  Rows that reduce to 0 = r must have
    r identically zero; otherwise InconsistentSystemError carries the r's.
    """
    m = [[Fraction(c) for c in row] for row in matrix]
    b = list(rhs)
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    piv_row = 0
    pivots = []
    for col in range(ncols):
        p = next((r for r in range(piv_row, nrows) if m[r][col] != 0), None)
        if p is None:
            raise ArithmeticError(f"column {col} has no pivot: system is underdetermined")
        m[piv_row], m[p] = m[p], m[piv_row]
        b[piv_row], b[p] = b[p], b[piv_row]
        inv = 1 / m[piv_row][col]
        m[piv_row] = [c * inv for c in m[piv_row]]
        b[piv_row] = b[piv_row] * inv
        for r in range(nrows):
            if r != piv_row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * c for a, c in zip(m[r], m[piv_row])]
                b[r] = b[r] - b[piv_row] * f
        pivots.append(col)
        piv_row += 1
    leftovers = [b[r] for r in range(piv_row, nrows) if not b[r].is_zero()]
    if leftovers:
        raise InconsistentSystemError("linear system is inconsistent", leftovers)
    return b[:ncols]
