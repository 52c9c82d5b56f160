"""Closest vector problem through a one-dimension lift to SAP.

For a guess ``beta`` the target ``x`` is folded into the lattice
``L' = L x {0} + Z (-x, 1)`` and the body becomes

    C' = C x [-1/(2 beta), 1/beta],   ||(y, z)||_{C'} = max(||y||_C, beta z, -2 beta z).

Lattice vectors with ``z = 1`` are exactly ``(w - x, 1)`` for ``w`` in L,
and their lifted gauge is ``max(||w - x||_C, beta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from gaugesieve.geometry import CenteredPolytope, gauge_exact
from gaugesieve.lattice import LatticeBasis, Subspace, in_lattice
from gaugesieve.linalg import QVector, qvec
from gaugesieve.oracle import OracleCapError
from gaugesieve.report import SolveReport, SolveStatus
from gaugesieve.sieve import ENUM_MAX_POINTS, LambdaBounds, SieveConfig, approx_sap

EPS_CVP_MAX = 0.33


class GridError(RuntimeError):
    """A lifted solution on a bracketing guess did not have ``z = 1``."""


@dataclass(frozen=True)
class LiftedInstance:
    body: CenteredPolytope
    basis: LatticeBasis
    subspace: Subspace
    beta: float
    target: QVector

    def unlift(self, coeffs) -> Optional[tuple[int, ...]]:
        """Coefficients of ``w`` in the original basis when ``z = 1``."""
        if int(coeffs[-1]) != 1:
            return None
        return tuple(int(c) for c in coeffs[:-1])


def lift(C: CenteredPolytope, B: LatticeBasis, x, beta: float) -> LiftedInstance:
    if beta <= 0:
        raise ValueError("beta must be positive")
    n = B.dim
    xq = qvec(x)
    bq = Fraction(beta)
    A = [tuple(row) + (Fraction(0),) for row in C.A]
    A.append((Fraction(0),) * n + (Fraction(1),))
    A.append((Fraction(0),) * n + (Fraction(-1),))
    b = list(C.b) + [1 / bq, 1 / (2 * bq)]
    body = CenteredPolytope.from_hrep(A, b, a0=[0] * (n + 1))
    rows = [tuple(B.B[i]) + (-xq[i],) for i in range(n)]
    rows.append((Fraction(0),) * n + (Fraction(1),))
    basis = LatticeBasis(tuple(rows))
    M = Subspace.spanned_by([[1 if j == i else 0 for j in range(n + 1)] for i in range(n)])
    return LiftedInstance(body, basis, M, beta, xq)


def lifted_gauge(C: CenteredPolytope, beta: float, y, z) -> Fraction:
    """``max(||y||_C, beta z, -2 beta z)`` evaluated exactly."""
    bq = Fraction(beta)
    zq = Fraction(z)
    return max(gauge_exact(C, y), bq * zq, -2 * bq * zq)


def l2_distance(B: LatticeBasis, x, max_points: int = ENUM_MAX_POINTS) -> float:
    """Euclidean distance from ``x`` to the lattice, by enumeration."""
    xq = qvec(x)
    xf = np.array(xq, float)
    c = np.array(B.coords(xq), float)
    seed = np.floor(c)
    rho = float(np.linalg.norm(B.B_f @ seed - xf)) * (1 + 1e-9) + 1e-12
    half = np.linalg.norm(B.Binv_f, axis=1) * rho
    lo = np.ceil(c - half - 1e-9).astype(int)
    hi = np.floor(c + half + 1e-9).astype(int)
    if math.prod(int(h - l + 1) for l, h in zip(lo, hi)) > max_points:
        raise OracleCapError("l2 distance enumeration exceeds the point cap")
    grid = np.meshgrid(*[np.arange(l, h + 1) for l, h in zip(lo, hi)], indexing="ij")
    cand = np.stack([g.ravel() for g in grid], axis=1)
    return float(np.linalg.norm(cand @ B.B_f.T - xf, axis=1).min())


def distance_guesses(C: CenteredPolytope, B: LatticeBasis, x) -> list[float]:
    """Geometric grid (ratio 3/2) that brackets ``d_C(L, x)``.

    ``d2 / R <= d_C <= d2 / r`` with d2 the Euclidean distance, so the grid
    from ``d2 / R`` up to ``d2 / r`` has some beta with ``beta <= d <= 1.5 beta``.
    """
    d2 = l2_distance(B, x)
    R, r = C.origin_outradius, C.origin_inradius
    bounds = LambdaBounds(d2 / R, R / r, True)
    return bounds.betas()


def _zero_distance(kind, B, xq, seed, params) -> SolveReport:
    coeffs = tuple(int(c) for c in B.coords(xq))
    return SolveReport(kind, SolveStatus.OK, xq, coeffs, Fraction(0), seed, params, [])


def _solve(C, B, x, eps, cfg, kind, exact_t, check_grid, max_distance=None):
    xq = qvec(x)
    params = {"eps": eps, **cfg.params()}
    if exact_t is not None:
        params["t"] = exact_t
    if in_lattice(B, xq):
        return _zero_distance(kind, B, xq, cfg.seed, params)
    betas = distance_guesses(C, B, xq)
    if max_distance is not None:
        if betas[0] > max_distance:
            params["pruned"] = True
            return SolveReport(kind, SolveStatus.EMPTY, seed=cfg.seed, params=params)
        betas = [b for b in betas if b <= max_distance]
    best = None
    guesses = []
    exhausted = 0
    for i, beta in enumerate(betas):
        inst = lift(C, B, xq, beta)
        # on the lift every vector off M has gauge >= beta, and (w - x, 1)
        # has gauge max(d, beta); so [beta, 1.5 beta] brackets it on a good guess
        bounds = LambdaBounds(beta, 1.5, True)
        rep = approx_sap(inst.body, inst.basis, inst.subspace, eps, cfg, (i,), kind="lifted-sap", bounds=bounds)
        entry = {"beta": beta, "status": rep.status.value, "pairs": rep.pairs_used}
        if rep.status is SolveStatus.BUDGET_EXHAUSTED:
            exhausted += 1
        if rep.found:
            w = inst.unlift(rep.coeffs)
            entry["z"] = int(rep.coeffs[-1])
            if w is None:
                if check_grid is not None and beta <= check_grid <= 1.5 * beta:
                    raise GridError(f"lifted solution on guess beta={beta} has z={rep.coeffs[-1]}")
            else:
                p = B.point(w)
                val = gauge_exact(C, [a - b for a, b in zip(p, xq)])
                entry["distance"] = float(val)
                if best is None or (val, w) < (best[0], best[1]):
                    best = (val, w, p)
        guesses.append(entry)
    if best is None:
        status = SolveStatus.BUDGET_EXHAUSTED if exhausted else SolveStatus.NOT_FOUND
        return SolveReport(kind, status, seed=cfg.seed, params=params, guesses=guesses)
    val, w, p = best
    return SolveReport(kind, SolveStatus.OK, p, w, val, cfg.seed, params, guesses)


def _clamp(eps: float) -> float:
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if eps >= 1 / 3:
        warnings.warn(f"eps={eps} clamped to {EPS_CVP_MAX} for CVP", stacklevel=3)
        eps = EPS_CVP_MAX
    return eps


def approx_cvp(
    C: CenteredPolytope,
    B: LatticeBasis,
    x,
    eps: float,
    cfg: SieveConfig = SieveConfig(),
    check_grid: Optional[float] = None,
) -> SolveReport:
    """Lattice vector within ``(1 + eps)`` of the closest, in gauge distance.

    ``eps`` must be below 1/3; values in ``[1/3, 1/2]`` are clamped to
    0.33 with a warning.  Passing the true distance as ``check_grid`` turns
    a ``z != 1`` answer on the bracketing guess into a :class:`GridError`.
    """
    return _solve(C, B, x, _clamp(eps), cfg, "approx-cvp", None, check_grid)


def approx_cvp_bounded(
    C: CenteredPolytope, B: LatticeBasis, x, eps: float, cfg: SieveConfig, max_distance: float
) -> SolveReport:
    """approx_cvp restricted to answers of distance at most ``max_distance``.

    Guesses above ``max_distance`` are skipped: when ``d_C(L, x)`` is within
    the limit some remaining guess still brackets it.  If even the Euclidean
    lower bound exceeds the limit the report is EMPTY without sieving.
    """
    return _solve(C, B, x, _clamp(eps), cfg, "approx-cvp", None, None, max_distance)


def exact_cvp(
    C: CenteredPolytope,
    B: LatticeBasis,
    x,
    t: float,
    cfg: SieveConfig = SieveConfig(),
    check_grid: Optional[float] = None,
) -> SolveReport:
    """Closest vector when ``d_C(L, x) <= t * lambda_1(C, L)``; SAP runs at eps = 1/t."""
    if t < 2:
        raise ValueError("t must be >= 2")
    return _solve(C, B, x, 1.0 / t, cfg, "exact-cvp", t, check_grid)

