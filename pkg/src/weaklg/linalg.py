"""Small exact linear algebra helpers over the rationals.

Forward elimination is fraction-free (Bareiss) on integer-scaled rows, so
intermediate entries stay integers of moderate size; rationals reappear only
during back-substitution.  Matrices are plain sequences of rows.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _scaled_integer_rows(rows):
    """Copy rows, scaling each by the lcm of its denominators."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) if den != 1 else int(x) for x in row])
    return out


def _echelon(rows):
    """Fraction-free row echelon form.  Returns (matrix, pivot column list)."""
    a = [row[:] for row in rows]
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows) -> int:
    mat = [r for r in _scaled_integer_rows(rows) if any(r)]
    if not mat:
        return 0
    _, pivots = _echelon(mat)
    return len(pivots)


def nullspace(rows, ncols=None):
    """Basis of the right nullspace as tuples of Fractions.

    One vector per free column, in free-column order, each scaled so that its
    first nonzero entry equals 1.  With no rows at all the result is the
    standard basis, so callers must pass ncols when rows may be empty.
    """
    rows = [list(r) for r in rows]
    if ncols is None:
        if not rows:
            raise ValueError("ncols is required when no rows are given")
        ncols = len(rows[0])
    mat = [r for r in _scaled_integer_rows(rows) if any(r)]
    if mat:
        ech, pivots = _echelon(mat)
    else:
        ech, pivots = [], []
    pivot_set = set(pivots)
    basis = []
    for fc in (c for c in range(ncols) if c not in pivot_set):
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i in reversed(range(len(pivots))):
            pc = pivots[i]
            s = Fraction(0)
            for j in range(pc + 1, ncols):
                if ech[i][j] and vec[j]:
                    s += ech[i][j] * vec[j]
            vec[pc] = -s / ech[i][pc]
        first = next(x for x in vec if x)
        if first != 1:
            vec = [x / first for x in vec]
        basis.append(tuple(vec))
    return basis


def det(matrix):
    """Exact determinant by cofactor expansion (meant for n <= 4)."""
    m = [list(r) for r in matrix]
    k = len(m)
    if k == 0:
        return 1
    if any(len(r) != k for r in m):
        raise ValueError("determinant needs a square matrix")
    if k == 1:
        return m[0][0]
    if k == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(k):
        if m[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in m[1:]]
            sub = det(minor)
            total += m[0][j] * sub if j % 2 == 0 else -m[0][j] * sub
    return total


def primitive(vec):
    """Divide an all-integer vector by the gcd of its entries."""
    g = 0
    for x in vec:
        g = math.gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in vec)
