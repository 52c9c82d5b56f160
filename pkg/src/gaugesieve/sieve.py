"""AKS-style sieve for near-symmetric gauges and the SAP solvers built on it.

State is a list of pairs ``(x_i, y_i)`` with ``y_i - x_i`` in the lattice.
The perturbation ``x_i`` is a float sample and never changes; the lattice
part is carried as an exact integer coefficient vector ``k_i`` with
``y_i = x_i + B k_i``.  A sieving stage therefore only ever subtracts
integer vectors, so the lattice invariant holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from gaugesieve.geometry import REL_TOL, CenteredPolytope, estimate_gamma, gauge, gauge_exact, gauge_star_many
from gaugesieve.lattice import LatticeBasis, Subspace, coefficients_in_subspace
from gaugesieve.linalg import QVector
from gaugesieve.report import BudgetExhausted, SolveReport, SolveStatus
from gaugesieve.sampling import PolytopeSampler, SamplerConfig, signed_batch

ENUM_MAX_POINTS = 2_000_000


class SieveInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class SieveConfig:
    """Knobs shared by every sieve-backed solver.

    ``budget_multiplier`` scales both terms of the pair count N0;
    ``max_pairs`` additionally caps it.  ``gamma`` overrides the Monte-Carlo
    symmetry estimate.
    """

    seed: int = 0
    budget_multiplier: float = 1.0
    max_pairs: Optional[int] = None
    gamma: Optional[float] = None
    gamma_samples: int = 20_000
    max_stages: Optional[int] = None
    sampler: str = "rejection"
    burn_in: int = 200
    check_invariants: bool = True

    def __post_init__(self):
        if not 0 < self.budget_multiplier <= 1:
            raise ValueError("budget_multiplier must lie in (0, 1]")
        if self.gamma is not None and not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.max_pairs is not None and self.max_pairs < 1:
            raise ValueError("max_pairs must be positive")

    def params(self) -> dict:
        return {
            "seed": self.seed,
            "budget_multiplier": self.budget_multiplier,
            "max_pairs": self.max_pairs,
            "gamma": self.gamma,
            "sampler": self.sampler,
        }


@dataclass(frozen=True)
class SievePair:
    x: np.ndarray
    y: np.ndarray


@dataclass
class PairList:
    """Columnar pair storage: ``y = x + B @ coeffs``."""

    basis: LatticeBasis
    x: np.ndarray
    coeffs: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    @property
    def y(self) -> np.ndarray:
        return self.x + self.coeffs @ self.basis.B_f.T

    @property
    def lattice_part(self) -> np.ndarray:
        """Coefficient vectors of ``y_i - x_i``."""
        return self.coeffs

    def __getitem__(self, idx) -> SievePair:
        x = self.x[idx]
        return SievePair(x, x + self.basis.B_f @ self.coeffs[idx])

    @classmethod
    def from_pairs(cls, pairs: Sequence[SievePair], basis: LatticeBasis) -> "PairList":
        n = basis.dim
        if not pairs:
            return cls(basis, np.empty((0, n)), np.empty((0, n), dtype=np.int64))
        X = np.array([np.atleast_1d(p.x) for p in pairs], float)
        Y = np.array([np.atleast_1d(p.y) for p in pairs], float)
        raw = (Y - X) @ basis.Binv_f.T
        k = np.rint(raw)
        bad = np.flatnonzero(np.abs(raw - k).max(axis=1) > 1e-9)
        if bad.size:
            raise SieveInvariantError(f"pair {bad[0]}: y - x is not a lattice vector")
        return cls(basis, X, k.astype(np.int64))


class SieveOutput(NamedTuple):
    centers: np.ndarray
    clustered: PairList
    assignment: np.ndarray


def basic_sieve(pairs: PairList, C: CenteredPolytope, beta: float, D: float, check: bool = True) -> SieveOutput:
    """One application of the sieving procedure.

    Pairs are scanned in index order; pair i joins the first existing center
    j with ``||y_i - y_j||_{s(x_j) C} <= D/2`` and otherwise becomes a
    center.  The scan is done center-by-center, which visits the same
    (i, j) comparisons in the same order as the one-pair-at-a-time loop.
    Non-center pairs come back as ``(x_i, y_i - y_c + x_c)``.
    """
    N = len(pairs)
    Y = pairs.y
    xs, signs = gauge_star_many(C, pairs.x) if N else (np.empty(0), np.empty(0, int))
    if check and N:
        ys, _ = gauge_star_many(C, Y)
        bad = np.flatnonzero(xs > beta * (1 + REL_TOL) + 1e-12)
        if bad.size:
            raise SieveInvariantError(f"pair {bad[0]}: ||x||* = {xs[bad[0]]} exceeds beta = {beta}")
        bad = np.flatnonzero(ys > D * (1 + REL_TOL) + 1e-12)
        if bad.size:
            raise SieveInvariantError(f"pair {bad[0]}: ||y||* = {ys[bad[0]]} exceeds D = {D}")

    G = C.gauge_rows
    half = D / 2
    assignment = np.full(N, -1, dtype=np.int64)
    centers = []
    remaining = np.arange(N)
    while remaining.size:
        j = remaining[0]
        centers.append(j)
        assignment[j] = j
        rest = remaining[1:]
        if not rest.size:
            break
        diff = signs[j] * (Y[rest] - Y[j])
        g = np.maximum((diff @ G.T).max(axis=1), 0.0)
        hit = g <= half
        assignment[rest[hit]] = j
        remaining = rest[~hit]

    centers = np.array(centers, dtype=np.int64)
    keep = np.ones(N, dtype=bool)
    keep[centers] = False
    members = np.flatnonzero(keep)
    parent = assignment[members]
    clustered = PairList(pairs.basis, pairs.x[members], pairs.coeffs[members] - pairs.coeffs[parent])
    return SieveOutput(centers, clustered, assignment)


def pair_budget(n: int, gamma: float, eps: float, D: float, beta: float) -> float:
    """Initial pair count ``4 ceil(6 ln(D/beta)) (20/g^2)^n + 8 (36/(g^2 eps))^n``."""
    stages = max(0, math.ceil(6 * math.log(D / beta)))
    g2 = gamma * gamma
    return 4 * stages * (20 / g2) ** n + 8 * (36 / (g2 * eps)) ** n


def max_stage_count(D: float, beta: float) -> int:
    return max(0, math.ceil(6 * math.log(D / beta)))


class ShortVector(NamedTuple):
    vector: QVector
    value: Fraction
    coeffs: tuple[int, ...]


@dataclass
class ShortVectorsResult:
    """The difference set of the surviving pairs, kept implicitly.

    ``survivors`` are the distinct lattice parts ``y_i - x_i`` (as
    coefficient vectors); the returned set is every pairwise difference
    outside M.
    """

    basis: LatticeBasis
    subspace_test: np.ndarray
    survivors: np.ndarray
    stats: dict
    trace: list = field(default_factory=list)

    def differences(self) -> np.ndarray:
        U = self.survivors
        n = self.basis.dim
        if len(U) < 2:
            return np.empty((0, n), dtype=np.int64)
        D = (U[:, None, :] - U[None, :, :]).reshape(-1, n)
        D = np.unique(D, axis=0)
        return D[~coefficients_in_subspace(self.subspace_test, D)]

    def vectors(self) -> list[QVector]:
        return [self.basis.point(c) for c in self.differences()]

    def shortest(self, C: CenteredPolytope) -> Optional[ShortVector]:
        """Minimum-gauge element of the difference set (exact tie-break)."""
        U = self.survivors
        k, n = U.shape
        if k < 2:
            return None
        P = U @ self.basis.B_f.T
        chunk = max(1, 2_000_000 // k)
        best = math.inf
        pool: list[tuple[float, np.ndarray]] = []
        for start in range(0, k, chunk):
            Dc = (U[start : start + chunk, None, :] - U[None, :, :]).reshape(-1, n)
            Pd = (P[start : start + chunk, None, :] - P[None, :, :]).reshape(-1, n)
            g = gauge(C, Pd)
            g[coefficients_in_subspace(self.subspace_test, Dc)] = np.inf
            m = g.min()
            if not np.isfinite(m) or m > best * (1 + REL_TOL) + 1e-15:
                continue
            best = min(best, m)
            near = np.flatnonzero(g <= m * (1 + REL_TOL) + 1e-15)
            pool.extend((g[i], Dc[i]) for i in near)
        if not pool:
            return None
        winner = None
        for g, c in pool:
            if g > best * (1 + REL_TOL) + 1e-15:
                continue
            coeffs = tuple(int(v) for v in c)
            vec = self.basis.point(coeffs)
            key = (gauge_exact(C, vec), coeffs)
            if winner is None or key < winner[0]:
                winner = (key, vec)
        (value, coeffs), vec = winner
        return ShortVector(vec, value, coeffs)


def _gamma_for(C: CenteredPolytope, cfg: SieveConfig) -> float:
    if cfg.gamma is not None:
        return cfg.gamma
    return min(1.0, estimate_gamma(C, cfg.gamma_samples, seed=cfg.seed))


def short_vectors(
    C: CenteredPolytope,
    B: LatticeBasis,
    M: Subspace,
    beta: float,
    eps: float,
    cfg: SieveConfig = SieveConfig(),
    stream: tuple[int, ...] = (),
    gamma: Optional[float] = None,
    keep_trace: bool = False,
) -> ShortVectorsResult:
    """Sample perturbations, sieve until ``D < 3 beta``, return differences."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    n = B.dim
    gamma = gamma if gamma is not None else _gamma_for(C, cfg)
    D0 = n * float(gauge(C, B.B_f.T).max())
    full = pair_budget(n, gamma, eps, D0, beta)
    N0 = max(1, math.ceil(cfg.budget_multiplier * full))
    if cfg.max_pairs is not None:
        N0 = min(N0, cfg.max_pairs)
    eta = 2.0 ** -(n + 1) / N0
    stats = {
        "beta": beta,
        "gamma": gamma,
        "D0": D0,
        "pairs_full_budget": full,
        "pairs": N0,
        "eta": eta,
        "stage_sizes": [],
        "centers": [],
    }

    sampler = PolytopeSampler(C, SamplerConfig(eta=eta, seed=cfg.seed, method=cfg.sampler, burn_in=cfg.burn_in), stream)
    X, _ = signed_batch(sampler, beta, N0)
    # y = x mod B, i.e. coefficients -floor(B^{-1} x)
    coeffs = -np.floor(X @ B.Binv_f.T).astype(np.int64)
    pairs = PairList(B, X, coeffs)
    trace = [pairs] if keep_trace else []

    D = D0
    t = 0
    while D >= 3 * beta:
        if cfg.max_stages is not None and t >= cfg.max_stages:
            stats["stopped_early"] = True
            break
        if not len(pairs):
            stats.update(stages=t, survivors=0)
            raise BudgetExhausted(f"pair population exhausted at stage {t} (D = {D:.4g}, beta = {beta:.4g})", stats)
        out = basic_sieve(pairs, C, beta, D, check=cfg.check_invariants)
        stats["stage_sizes"].append(len(pairs))
        stats["centers"].append(len(out.centers))
        pairs = out.clustered
        if keep_trace:
            trace.append(pairs)
        D = D / 2 + beta
        t += 1
    stats.update(stages=t, survivors=len(pairs), D_final=D)
    if not len(pairs):
        raise BudgetExhausted(f"no pairs survived {t} stages (beta = {beta:.4g})", stats)
    survivors = np.unique(pairs.coeffs, axis=0)
    stats["distinct_survivors"] = len(survivors)
    return ShortVectorsResult(B, M.coefficient_test(B), survivors, stats, trace)


class LambdaBounds(NamedTuple):
    nu: float
    ratio: float
    enumerated: bool

    @property
    def guess_count(self) -> int:
        return math.ceil(math.log(self.ratio) / math.log(1.5)) + 1

    def betas(self) -> list[float]:
        return [1.5**i * self.nu for i in range(self.guess_count)]


def l2_sap_minimum(B: LatticeBasis, M: Subspace, max_points: int = ENUM_MAX_POINTS) -> Optional[float]:
    """Shortest Euclidean length over ``L \\ M``, or None past the size cap."""
    n = B.dim
    W = M.coefficient_test(B)
    unit = np.vstack([np.eye(n, dtype=np.int64), -np.eye(n, dtype=np.int64)])
    unit = unit[~coefficients_in_subspace(W, unit)]
    rho = float(np.linalg.norm(unit @ B.B_f.T, axis=1).min()) * (1 + 1e-9)
    half = np.linalg.norm(B.Binv_f, axis=1) * rho
    hi = np.floor(half + 1e-9).astype(int)
    if math.prod(2 * int(h) + 1 for h in hi) > max_points:
        return None
    grid = np.meshgrid(*[np.arange(-h, h + 1) for h in hi], indexing="ij")
    cand = np.stack([g.ravel() for g in grid], axis=1)
    cand = cand[~coefficients_in_subspace(W, cand)]
    return float(np.linalg.norm(cand @ B.B_f.T, axis=1).min())


def lambda_bounds(C: CenteredPolytope, B: LatticeBasis, M: Subspace) -> LambdaBounds:
    """``nu`` with ``nu <= lambda(C, L, M) <= ratio * nu``.

    With the exact l2 minimum mu2 in hand, ``nu = mu2 / R`` and
    ``ratio = R / r`` (R, r the outer and inner radii of C about 0).
    """
    R, r = C.origin_outradius, C.origin_inradius
    mu2 = l2_sap_minimum(B, M)
    if mu2 is not None:
        return LambdaBounds(mu2 / R, R / r, True)
    cols = B.B_f.T
    W = M.coefficient_test(B)
    outside = ~coefficients_in_subspace(W, np.eye(B.dim, dtype=np.int64))
    shortest = float(np.linalg.norm(cols[outside], axis=1).min())
    n = B.dim
    return LambdaBounds(shortest / (R * 2**n), 2**n * R / r, False)


def approx_sap(
    C: CenteredPolytope,
    B: LatticeBasis,
    M: Subspace,
    eps: float,
    cfg: SieveConfig = SieveConfig(),
    stream: tuple[int, ...] = (),
    kind: str = "approx-sap",
    gamma: Optional[float] = None,
    bounds: Optional[LambdaBounds] = None,
) -> SolveReport:
    """Run ShortVectors on the geometric beta grid and keep the best vector.

    ``bounds`` replaces the enumeration-based bracket when the caller
    already knows one.
    """
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    bounds = bounds or lambda_bounds(C, B, M)
    gamma = gamma if gamma is not None else _gamma_for(C, cfg)
    best: Optional[ShortVector] = None
    guesses = []
    exhausted = 0
    for i, beta in enumerate(bounds.betas()):
        try:
            res = short_vectors(C, B, M, beta, eps, cfg, stream + (i,), gamma=gamma)
        except BudgetExhausted as exc:
            exhausted += 1
            guesses.append({**exc.stats, "exhausted": True})
            continue
        sv = res.shortest(C)
        entry = {**res.stats, "exhausted": False, "found": None if sv is None else float(sv.value)}
        guesses.append(entry)
        if sv is not None and (best is None or (sv.value, sv.coeffs) < (best.value, best.coeffs)):
            best = sv
    params = {
        "eps": eps,
        "nu": bounds.nu,
        "ratio": bounds.ratio,
        "nu_from_enumeration": bounds.enumerated,
        "gamma": gamma,
        **cfg.params(),
    }
    if best is None:
        status = SolveStatus.BUDGET_EXHAUSTED if exhausted else SolveStatus.NOT_FOUND
        return SolveReport(kind, status, seed=cfg.seed, params=params, guesses=guesses)
    return SolveReport(kind, SolveStatus.OK, best.vector, best.coeffs, best.value, cfg.seed, params, guesses)


def exact_sap(
    C: CenteredPolytope,
    B: LatticeBasis,
    M: Subspace,
    t: float,
    cfg: SieveConfig = SieveConfig(),
    stream: tuple[int, ...] = (),
    gamma: Optional[float] = None,
    bounds: Optional[LambdaBounds] = None,
) -> SolveReport:
    """Exact SAP when the caller knows ``lambda(C, L, M) <= t * lambda_1(C, L)``."""
    if t < 2:
        raise ValueError("t must be >= 2")
    rep = approx_sap(C, B, M, 1.0 / t, cfg, stream, kind="exact-sap", gamma=gamma, bounds=bounds)
    rep.params["t"] = t
    return rep
