"""Exact linear algebra over the rationals by fraction-free (Bareiss) elimination.

Matrices are lists of rows. Rational rows are first scaled to integer rows
(row scaling preserves rank and kernel), then reduced with Bareiss' one-step
fraction-free rule, whose divisions are exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

__all__ = ["integer_rows", "bareiss_echelon", "rank", "nullspace", "solve", "det"]


def integer_rows(rows: Sequence[Sequence]) -> list:
    out = []
    for row in rows:
        den = 1
        for c in row:
            if c:
                den = lcm(den, Fraction(c).denominator)
        out.append([int(Fraction(c) * den) for c in row])
    return out


def bareiss_echelon(rows: Sequence[Sequence[int]], ncols: int | None = None):
    """Row echelon form of an integer matrix.

    Returns ``(echelon_rows, pivot_columns, sign)`` where ``sign`` tracks row
    swaps; for a square nonsingular input the last pivot is the determinant
    times ``sign``.
    """
    M = [list(r) for r in rows]
    n = len(M)
    if ncols is None:
        ncols = len(M[0]) if M else 0
    prev, r, sign = 1, 0, 1
    pivots = []
    for c in range(ncols):
        if r == n:
            break
        piv = next((i for i in range(r, n) if M[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
            sign = -sign
        p = M[r][c]
        top = M[r]
        for i in range(r + 1, n):
            row = M[i]
            a = row[c]
            if a:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - a * top[j]) // prev
            elif p != prev:
                for j in range(c + 1, ncols):
                    if row[j]:
                        row[j] = (p * row[j]) // prev
            row[c] = 0
        prev = p
        pivots.append(c)
        r += 1
    return M[:r], pivots, sign


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(bareiss_echelon(integer_rows(rows))[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of ``{x : M x = 0}`` as lists of Fractions, one vector per free column.

    Each basis vector has a 1 in its free column and 0 in the other free columns.
    """
    if not rows:
        return [[Fraction(int(i == f)) for i in range(ncols)] for f in range(ncols)]
    ech, pivots, _ = bareiss_echelon(integer_rows(rows), ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            row = ech[r]
            s = sum((row[j] * x[j] for j in range(pc + 1, ncols) if row[j] and x[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(x)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence):
    """One solution of ``M x = b`` (free variables set to 0), or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ech, pivots, _ = bareiss_echelon(integer_rows(aug), ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for r in range(len(pivots) - 1, -1, -1):
        pc = pivots[r]
        row = ech[r]
        s = sum((row[j] * x[j] for j in range(pc + 1, ncols) if row[j] and x[j]), Fraction(0))
        x[pc] = (row[ncols] - s) / row[pc]
    return x


def det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    ints = []
    for row in rows:
        den = 1
        for c in row:
            if c:
                den = lcm(den, Fraction(c).denominator)
        scale /= den
        ints.append([int(Fraction(c) * den) for c in row])
    ech, pivots, sign = bareiss_echelon(ints, n)
    if len(pivots) < n:
        return Fraction(0)
    return sign * ech[-1][-1] * scale
