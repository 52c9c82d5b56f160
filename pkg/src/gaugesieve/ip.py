"""Approximate integer programming: feasibility and objective maximisation.

Feasibility follows the barycenter-then-CVP recipe: pick ``b`` near the
centroid of K, find an approximately closest lattice point ``y`` to ``b``
under the gauge of ``K - b``, and accept ``y`` iff that gauge is at most
``1 + 3 eps / 4``.  The acceptance test is exact, so a returned point is
always valid; only an EMPTY verdict can be wrong.

Optimisation is a binary search on the objective over slabs of K with the
feasibility routine as the oracle.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from gaugesieve import linalg
from gaugesieve.cvp import approx_cvp_bounded
from gaugesieve.geometry import (
    REL_TOL,
    CenteredPolytope,
    GeometryError,
    barycenter_approx,
    chebyshev_center,
    facet_minima,
    gauge_exact,
    recenter,
)
from gaugesieve.lattice import LatticeBasis
from gaugesieve.linalg import QVector, fmt_rational, qvec
from gaugesieve.report import SolveStatus
from gaugesieve.sieve import SieveConfig

log = logging.getLogger(__name__)

# slabs thinner than this (Chebyshev radius) are treated as empty branches
MIN_SLAB_RADIUS = 1e-9


class IPStatus(str, Enum):
    FOUND_IN_K = "FOUND_IN_K"
    FOUND_IN_BLOWUP = "FOUND_IN_BLOWUP"
    EMPTY = "EMPTY"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

    @property
    def found(self) -> bool:
        return self in (IPStatus.FOUND_IN_K, IPStatus.FOUND_IN_BLOWUP)


@dataclass
class IPResult:
    status: IPStatus
    point: Optional[QVector]
    blowup_gauge: Optional[Fraction]
    barycenter: np.ndarray
    eps: float
    seed: int
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status.found

    def to_dict(self) -> dict:
        return {
            "kind": "ip-feasible",
            "status": self.status.value,
            "vector": None if self.point is None else [fmt_rational(v) for v in self.point],
            "value": None
            if self.blowup_gauge is None
            else {"decimal": float(self.blowup_gauge), "rational": fmt_rational(self.blowup_gauge)},
            "barycenter": self.barycenter.tolist(),
            "seed": self.seed,
            "params": {"eps": self.eps},
            "budget": self.stats,
        }


def derive_seed(seed: int, *stream: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=tuple(stream)).generate_state(1, np.uint64)[0] >> 1)


def approx_ip(K: CenteredPolytope, B: LatticeBasis, eps: float, cfg: SieveConfig = SieveConfig()) -> IPResult:
    """Lattice point of ``(1 + eps) K - eps b(K)`` or EMPTY."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    b = barycenter_approx(K, 1 / 3, seed=cfg.seed)
    Kb = recenter(K, b)
    threshold = 1 + Fraction(3, 4) * Fraction(eps)
    rep = approx_cvp_bounded(Kb, B, b, 2 * eps / 5, cfg, max_distance=float(threshold))
    stats = {"cvp_status": rep.status.value, "pairs": rep.pairs_used, "guesses": len(rep.guesses)}
    if rep.params.get("pruned"):
        stats["pruned"] = True
    if rep.status is SolveStatus.BUDGET_EXHAUSTED:
        return IPResult(IPStatus.BUDGET_EXHAUSTED, None, None, b, eps, cfg.seed, stats)
    # NOT_FOUND: every sieve within the threshold completed without a z = 1 vector
    if rep.status in (SolveStatus.EMPTY, SolveStatus.NOT_FOUND):
        return IPResult(IPStatus.EMPTY, None, None, b, eps, cfg.seed, stats)
    y = rep.vector
    g = gauge_exact(Kb, [yi - bi for yi, bi in zip(y, qvec(b))])
    if g <= 1:
        return IPResult(IPStatus.FOUND_IN_K, y, g, b, eps, cfg.seed, stats)
    if g <= threshold:
        return IPResult(IPStatus.FOUND_IN_BLOWUP, y, g, b, eps, cfg.seed, stats)
    return IPResult(IPStatus.EMPTY, None, g, b, eps, cfg.seed, stats)


def ip_gauge_test(K: CenteredPolytope, b, y, eps: float) -> bool:
    """Independent recomputation of the acceptance test ``||y - b||_{K-b} <= 1 + 3 eps/4``."""
    bq = qvec(b)
    A, rhs = K.A, K.b
    shifted = [bi - linalg.dot(ai, bq) for ai, bi in zip(A, rhs)]
    d = [yi - ci for yi, ci in zip(qvec(y), bq)]
    g = max([Fraction(0)] + [linalg.dot(ai, d) / si for ai, si in zip(A, shifted)])
    return g <= 1 + Fraction(3, 4) * Fraction(eps)


def objective_bounds(K: CenteredPolytope, v, delta: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Minimiser and maximiser of ``<v, x>`` over K (exact LP, zero slack)."""
    vf = np.array(qvec(v), float)
    free = [(None, None)] * K.dim
    out = []
    for sign in (1, -1):
        res = linprog(sign * vf, A_ub=K.A_f, b_ub=K.b_f, bounds=free, method="highs")
        if res.status != 0:
            raise GeometryError(f"objective LP failed: {res.message}")
        out.append(res.x)
    return out[0], out[1]


def restrict(K: CenteredPolytope, v, lo, hi) -> Optional[CenteredPolytope]:
    """``K ∩ {lo <= <v, x> <= hi}``, recentered; None when the slab is (nearly) empty."""
    vq = qvec(v)
    A = list(K.A) + [vq, tuple(-c for c in vq)]
    b = list(K.b) + [linalg.to_fraction(hi), -linalg.to_fraction(lo)]
    Af, bf = np.array(A, float), np.array(b, float)
    center, radius = chebyshev_center(Af, bf)
    if not radius > MIN_SLAB_RADIUS:
        return None
    try:
        return CenteredPolytope.from_hrep(A, b, a0=center, r=radius)
    except GeometryError:
        return None


def blowup_membership(K: CenteredPolytope, eps: float, y, minima: Optional[np.ndarray] = None) -> bool:
    """Whether y lies in ``K + eps (K - K)``.

    Each facet ``<a_i, x> <= b_i`` relaxes by ``eps`` times its variation
    ``b_i - min_K <a_i, x>``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    mins = facet_minima(K) if minima is None else minima
    yf = np.array(qvec(y), float)
    rhs = K.b_f + eps * (K.b_f - mins)
    return bool(np.all(K.A_f @ yf <= rhs + REL_TOL * (1 + np.abs(rhs))))


class OptStatus(str, Enum):
    SOLVED = "SOLVED"
    EMPTY = "EMPTY"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"
    ITERATION_CAP = "ITERATION_CAP"


@dataclass
class OptResult:
    status: OptStatus
    point: Optional[QVector]
    value: Optional[Fraction]
    bracket: tuple[float, float]
    iterations: int
    contractions: list[float]
    seed: int
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "ip-optimize",
            "status": self.status.value,
            "vector": None if self.point is None else [fmt_rational(v) for v in self.point],
            "value": None
            if self.value is None
            else {"decimal": float(self.value), "rational": fmt_rational(self.value)},
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "contractions": self.contractions,
            "seed": self.seed,
            "budget": self.stats,
        }


def repeat_count(n: int, R: float, vnorm: float, delta: float) -> int:
    inner = math.log(R * vnorm / delta) if R * vnorm > delta else 0.0
    return max(1, math.ceil(1 + math.log(inner) / n)) if inner > 1 else 1


def iteration_cap(R: float, vnorm: float, delta: float) -> int:
    return max(1, math.ceil(math.log(4 * R * vnorm / delta) / math.log(4 / 3)))


class _Oracle:
    """Repeated ApproxIP on a slab; a FOUND answer must also pass the blowup test."""

    def __init__(self, B, eps, cfg, repeats):
        self.B, self.eps, self.cfg, self.repeats = B, eps, cfg, repeats
        self.calls = 0
        self.rejected = 0
        self.exhausted = 0

    def __call__(self, Ks: Optional[CenteredPolytope]) -> Optional[QVector]:
        if Ks is None:
            return None
        self.calls += 1
        mins = None
        for rep in range(self.repeats):
            cfg = dataclasses.replace(self.cfg, seed=derive_seed(self.cfg.seed, self.calls, rep))
            res = approx_ip(Ks, self.B, self.eps, cfg)
            if res.status is IPStatus.BUDGET_EXHAUSTED:
                self.exhausted += 1
            if not res.found:
                continue
            mins = facet_minima(Ks) if mins is None else mins
            if blowup_membership(Ks, self.eps, res.point, mins):
                return res.point
            self.rejected += 1
        return None


def approx_opt(
    K: CenteredPolytope,
    B: LatticeBasis,
    v,
    eps: float,
    delta: float,
    cfg: SieveConfig = SieveConfig(),
    repeats: Optional[int] = None,
) -> OptResult:
    """Binary search for a lattice point of ``K + eps (K - K)`` within delta of the best in K."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if delta <= 0:
        raise ValueError("delta must be positive")
    vq = qvec(v)
    vf = np.array(vq, float)
    vnorm = float(np.linalg.norm(vf))
    if vnorm == 0:
        raise ValueError("objective must be non-zero")
    delta = min(delta, vnorm * K.r)
    k = repeats if repeats is not None else repeat_count(K.dim, K.R, vnorm, delta)
    cap = iteration_cap(K.R, vnorm, delta)
    oracle = _Oracle(B, eps, cfg, k)

    def stats():
        return {
            "delta": delta,
            "repeats": k,
            "iteration_cap": cap,
            "ip_calls": oracle.calls,
            "rejected": oracle.rejected,
            "exhausted": oracle.exhausted,
        }

    def value(p) -> Fraction:
        return linalg.dot(vq, p)

    z = oracle(K)
    if z is None:
        status = OptStatus.BUDGET_EXHAUSTED if oracle.exhausted == k else OptStatus.EMPTY
        return OptResult(status, None, None, (math.nan, math.nan), 0, [], cfg.seed, stats())

    _, x_u = objective_bounds(K, vq, delta)
    l = float(value(z))
    u = float(vf @ x_u) + delta / 12
    contractions = []
    it = 0
    while u - l > delta:
        if it >= cap:
            log.warning("iteration cap %d reached with gap %.3g", cap, u - l)
            return OptResult(OptStatus.ITERATION_CAP, z, value(z), (l, u), it, contractions, cfg.seed, stats())
        it += 1
        gap = u - l
        m = (u + l) / 2
        y = oracle(restrict(K, vq, m, u))
        if y is None:
            u = m
            y = oracle(restrict(K, vq, l, m))
            if y is None:
                u, y = l, z
        if value(z) < value(y):
            z = y
            l = float(value(z))
        contractions.append((u - l) / gap)
    return OptResult(OptStatus.SOLVED, z, value(z), (l, u), it, contractions, cfg.seed, stats())
