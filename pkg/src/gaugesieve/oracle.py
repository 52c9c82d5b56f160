"""Brute-force ground truth by bounded coefficient enumeration.

Every search starts from a feasible point, turns its gauge value into an
l2 ball via ``||y||_2 <= R0 ||y||_C`` (R0 the outer radius of C about the
origin), and boxes that ball in coefficient space using the row norms of
``B^{-1}``.  Float gauges prune; the winners are re-evaluated exactly and
ties go to the lexicographically smallest coefficient vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from gaugesieve.geometry import REL_TOL, CenteredPolytope, gauge, gauge_exact
from gaugesieve.lattice import LatticeBasis, Subspace, coefficients_in_subspace, lattice_floor
from gaugesieve.linalg import QVector, qvec

DEFAULT_MAX_N = 5
MAX_BOX_POINTS = 4_000_000


class OracleCapError(RuntimeError):
    pass


class OracleResult(NamedTuple):
    vector: QVector
    value: Fraction
    coeffs: tuple[int, ...]

    @property
    def distance(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class EnumerationBound:
    radius_gauge: float
    radius_l2: float
    coefficient_box: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.coefficient_box)


def enumeration_bound(B: LatticeBasis, center_coords: np.ndarray, radius_gauge: float, R0: float) -> EnumerationBound:
    rho2 = radius_gauge * R0 * (1 + 1e-7) + 1e-12
    half = np.linalg.norm(B.Binv_f, axis=1) * rho2
    lo = np.ceil(center_coords - half - 1e-9).astype(int)
    hi = np.floor(center_coords + half + 1e-9).astype(int)
    return EnumerationBound(radius_gauge, rho2, tuple(zip(lo.tolist(), hi.tolist())))


def _box_points(bound: EnumerationBound) -> np.ndarray:
    if bound.size > MAX_BOX_POINTS:
        raise OracleCapError(f"enumeration box holds {bound.size} points (cap {MAX_BOX_POINTS})")
    axes = [np.arange(lo, hi + 1) for lo, hi in bound.coefficient_box]
    # meshgrid in 'ij' order keeps rows lexicographically sorted
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def _check_dim(n: int, max_n: int):
    if n > max_n:
        raise OracleCapError(f"dimension {n} exceeds oracle cap {max_n}")


def _exact_argmin(C, B, coeffs, approx, target: QVector | None) -> OracleResult:
    best = approx.min()
    near = np.flatnonzero(approx <= best + REL_TOL * (1 + best))
    winner = None
    for idx in near:
        c = tuple(int(v) for v in coeffs[idx])
        p = B.point(c)
        diff = p if target is None else tuple(a - t for a, t in zip(p, target))
        val = gauge_exact(C, diff)
        key = (val, c)
        if winner is None or key < winner[0]:
            winner = (key, p)
    (val, c), p = winner
    return OracleResult(p, val, c)


def cvp_brute(C: CenteredPolytope, B: LatticeBasis, x, max_n: int = DEFAULT_MAX_N) -> OracleResult:
    """Exact closest lattice vector to ``x`` under ``||.||_C``."""
    n = B.dim
    _check_dim(n, max_n)
    xq = qvec(x)
    seed = B.point(lattice_floor(B, xq))
    rho = float(gauge_exact(C, [a - b for a, b in zip(seed, xq)]))
    center = np.array(B.coords(xq), float)
    bound = enumeration_bound(B, center, rho, C.origin_outradius)
    coeffs = _box_points(bound)
    xf = np.array(xq, float)
    vals = gauge(C, coeffs @ B.B_f.T - xf)
    return _exact_argmin(C, B, coeffs, vals, xq)


def sap_brute(C: CenteredPolytope, B: LatticeBasis, M: Subspace, max_n: int = DEFAULT_MAX_N) -> OracleResult:
    """Exact minimiser of ``||y||_C`` over ``L \\ M``."""
    n = B.dim
    _check_dim(n, max_n)
    W = M.coefficient_test(B)
    units = np.vstack([np.eye(n, dtype=np.int64), -np.eye(n, dtype=np.int64)])
    outside = ~coefficients_in_subspace(W, units)
    rho = min(float(gauge_exact(C, B.point(u))) for u in units[outside])
    bound = enumeration_bound(B, np.zeros(n), rho, C.origin_outradius)
    coeffs = _box_points(bound)
    coeffs = coeffs[~coefficients_in_subspace(W, coeffs)]
    vals = gauge(C, coeffs @ B.B_f.T)
    return _exact_argmin(C, B, coeffs, vals, None)


def svp_brute(C: CenteredPolytope, B: LatticeBasis, max_n: int = DEFAULT_MAX_N) -> OracleResult:
    return sap_brute(C, B, Subspace.zero(B.dim), max_n)


def ip_points(K: CenteredPolytope, B: LatticeBasis, max_n: int = DEFAULT_MAX_N) -> list[QVector]:
    """All points of ``K ∩ L``, sorted by coefficient vector."""
    _check_dim(B.dim, max_n)
    lo, hi = K.bounding_box
    center = (lo + hi) / 2
    half_diag = float(np.linalg.norm(hi - lo)) / 2
    bound = enumeration_bound(B, B.Binv_f @ center, half_diag, 1.0)
    coeffs = _box_points(bound)
    P = coeffs @ B.B_f.T
    tol = REL_TOL * (1 + np.abs(K.b_f))
    maybe = np.all(P @ K.A_f.T <= K.b_f + tol, axis=1)
    out = []
    for c in coeffs[maybe]:
        p = B.point(c)
        if K.contains(p, exact=True):
            out.append(p)
    return out


def ip_brute(K: CenteredPolytope, B: LatticeBasis, max_n: int = DEFAULT_MAX_N) -> Optional[QVector]:
    """Some point of ``K ∩ L``, or ``None`` when K is lattice-free."""
    pts = ip_points(K, B, max_n)
    return pts[0] if pts else None

