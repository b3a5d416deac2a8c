"""Exact determinants over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def bareiss(rows: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination on an integer matrix (modified in place)."""
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for r in range(k + 1, n):
                if rows[r][k] != 0:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        rk = rows[k]
        for i in range(k + 1, n):
            ri = rows[i]
            rik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - rik * rk[j]) // prev
        prev = pivot
    return sign * rows[n - 1][n - 1]


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square matrix of ints/Fractions.

    Each row is scaled to integers by the lcm of its denominators, the
    integer determinant is taken by Bareiss elimination and the scale
    is divided back out.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    scale = 1
    rows = []
    for row in matrix:
        row = [Fraction(v) for v in row]
        m = lcm(*(v.denominator for v in row)) if row else 1
        scale *= m
        rows.append([int(v * m) for v in row])
    return Fraction(bareiss(rows), scale)


def cofactor_determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Laplace expansion along the first row; an independent check for small matrices."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(matrix[0][0])
    total = Fraction(0)
    for j in range(n):
        if matrix[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in (list(r) for r in matrix[1:])]
        total += (-1) ** j * Fraction(matrix[0][j]) * cofactor_determinant(minor)
    return total
