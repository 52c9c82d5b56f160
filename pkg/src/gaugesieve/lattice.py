"""Lattice bases, coset reduction and subspace bookkeeping.

Lattice membership and ``x mod B`` are decided in exact rational
arithmetic; the float copies exist only for bulk sampling work where the
integer coefficient vectors carry the exact information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from gaugesieve import linalg
from gaugesieve.linalg import QMatrix, QVector, fmt_rational, qmat, qvec


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """Full-rank basis; the *columns* of ``B`` are the basis vectors."""

    B: QMatrix

    def __post_init__(self):
        B = qmat(self.B)
        if not B or len(B) != len(B[0]):
            raise ValueError("basis must be a square matrix")
        if linalg.det(B) == 0:
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "B", B)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "LatticeBasis":
        return cls(linalg.transpose(qmat(columns)))

    @classmethod
    def identity(cls, n: int, scale=1) -> "LatticeBasis":
        return cls(tuple(tuple(Fraction(scale) if i == j else Fraction(0) for j in range(n)) for i in range(n)))

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeBasis":
        return cls(data["B"])

    def to_dict(self) -> dict:
        return {"B": [[fmt_rational(v) for v in row] for row in self.B]}

    @property
    def dim(self) -> int:
        return len(self.B)

    @cached_property
    def Binv(self) -> QMatrix:
        return linalg.inverse(self.B)

    @cached_property
    def B_f(self) -> np.ndarray:
        return np.array(self.B, dtype=float)

    @cached_property
    def Binv_f(self) -> np.ndarray:
        return np.array(self.Binv, dtype=float)

    @cached_property
    def columns(self) -> tuple[QVector, ...]:
        return linalg.transpose(self.B)

    def coords(self, x) -> QVector:
        """Exact coordinates ``B^{-1} x``."""
        return linalg.matvec(self.Binv, qvec(x))

    def point(self, coeffs: Sequence[int]) -> QVector:
        """Exact lattice point ``B c`` for an integer coefficient vector."""
        return linalg.matvec(self.B, [Fraction(int(c)) for c in coeffs])

    def scaled(self, factor) -> "LatticeBasis":
        f = linalg.to_fraction(factor)
        return LatticeBasis(tuple(tuple(f * v for v in row) for row in self.B))


def mod_basis(B: LatticeBasis, x) -> QVector:
    """Representative of ``x + L`` in the half-open parallelepiped ``B[0,1)^n``."""
    c = B.coords(x)
    frac = [ci - math.floor(ci) for ci in c]
    return linalg.matvec(B.B, frac)


def lattice_floor(B: LatticeBasis, x) -> tuple[int, ...]:
    """Integer coefficients of ``x - (x mod B)``."""
    return tuple(math.floor(ci) for ci in B.coords(x))


def in_lattice(B: LatticeBasis, x) -> bool:
    return all(ci.denominator == 1 for ci in B.coords(x))


@dataclass(frozen=True, eq=False)
class Subspace:
    """A proper linear subspace, stored with an exact orthogonal complement."""

    span: tuple[QVector, ...]
    n: int

    def __post_init__(self):
        span = tuple(qvec(v) for v in self.span)
        if any(len(v) != self.n for v in span):
            raise ValueError("spanning vectors have wrong dimension")
        object.__setattr__(self, "span", span)
        if self.dim >= self.n:
            raise ValueError("subspace must be proper (dim <= n - 1)")

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls((), n)

    @classmethod
    def spanned_by(cls, vectors: Sequence[Sequence]) -> "Subspace":
        vectors = [qvec(v) for v in vectors]
        if not vectors:
            raise ValueError("use Subspace.zero(n) for the trivial subspace")
        return cls(tuple(vectors), len(vectors[0]))

    @classmethod
    def from_dict(cls, data: dict, n: int) -> "Subspace":
        return cls(tuple(qvec(v) for v in data.get("span", [])), n)

    def to_dict(self) -> dict:
        return {"span": [[fmt_rational(v) for v in vec] for vec in self.span]}

    @cached_property
    def dim(self) -> int:
        return linalg.rank(self.span) if self.span else 0

    @cached_property
    def complement(self) -> tuple[QVector, ...]:
        """Basis of the orthogonal complement (rows test membership)."""
        return tuple(linalg.nullspace(self.span, self.n))

    def coefficient_test(self, B: LatticeBasis) -> np.ndarray:
        """Integer matrix W with ``B c ∈ M  iff  W c = 0`` for integer c."""
        W = linalg.matmul(self.complement, B.B)
        rows = linalg.integer_rows(W)
        big = max((abs(v) for r in rows for v in r), default=0)
        return np.array(rows, dtype=object if big > 2**40 else np.int64).reshape(len(rows), self.n)


def in_subspace(M: Subspace, x) -> bool:
    xq = qvec(x)
    return all(linalg.dot(c, xq) == 0 for c in M.complement)


def coefficients_in_subspace(W: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Row-wise ``W c == 0`` for a batch of integer coefficient vectors."""
    if W.shape[0] == 0:
        return np.ones(len(coeffs), dtype=bool)
    return np.all(coeffs @ W.T == 0, axis=1)
