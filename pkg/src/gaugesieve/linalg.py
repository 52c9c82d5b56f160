"""Exact rational linear algebra on small dense matrices.

Matrices are tuples of row tuples of :class:`fractions.Fraction`.  Everything
here is O(n^3) Gauss-Jordan and meant for n <= 8 or so.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

QVector = tuple[Fraction, ...]
QMatrix = tuple[QVector, ...]


def to_fraction(value) -> Fraction:
    """Convert ints, floats, Fractions and ``"p/q"`` strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def qvec(values: Iterable) -> QVector:
    return tuple(to_fraction(v) for v in values)


def qmat(rows: Iterable[Iterable]) -> QMatrix:
    out = tuple(qvec(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("ragged matrix")
    return out


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def transpose(M: QMatrix) -> QMatrix:
    return tuple(zip(*M)) if M else ()


def matvec(M: QMatrix, x: Sequence[Fraction]) -> QVector:
    return tuple(sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in M)


def matmul(M: QMatrix, N: QMatrix) -> QMatrix:
    Nt = transpose(N)
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Nt) for row in M)


def dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def rref(M: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in M]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    pr = 0
    for pc in range(cols):
        sel = next((i for i in range(pr, rows) if m[i][pc] != 0), None)
        if sel is None:
            continue
        m[pr], m[sel] = m[sel], m[pr]
        piv = m[pr][pc]
        m[pr] = [v / piv for v in m[pr]]
        for i in range(rows):
            if i != pr and m[i][pc] != 0:
                f = m[i][pc]
                m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
        pivots.append(pc)
        pr += 1
        if pr == rows:
            break
    return m, pivots


def rank(M: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(M)[1])


def inverse(M: QMatrix) -> QMatrix:
    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return tuple(tuple(r[n:]) for r in red)


def det(M: QMatrix) -> Fraction:
    m = [list(r) for r in M]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        sel = next((i for i in range(c, n) if m[i][c] != 0), None)
        if sel is None:
            return Fraction(0)
        if sel != c:
            m[c], m[sel] = m[sel], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return out


def nullspace(M: Sequence[Sequence[Fraction]], ncols: int) -> list[QVector]:
    """Basis of {x : M x = 0} for an ``len(M) x ncols`` matrix."""
    if not M:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(tuple(v))
    return basis


def integer_rows(M: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in M:
        s = lcm(*(q.denominator for q in row)) if row else 1
        out.append([int(q * s) for q in row])
    return out
