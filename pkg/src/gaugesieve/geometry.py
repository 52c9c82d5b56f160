"""H-polytopes and the gauge (Minkowski functional) they induce.

A :class:`CenteredPolytope` stores its facets ``A x <= b`` exactly as
rationals and keeps float copies for the vectorised hot paths.  When the
origin is strictly interior (``b > 0``) the gauge has the closed form

    ||x||_C = max(0, max_i <a_i, x> / b_i)

which is what every solver in this package evaluates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from gaugesieve import linalg
from gaugesieve.linalg import QMatrix, QVector, fmt_rational, qmat, qvec

# relative slack used whenever a float gauge is compared against a bound
REL_TOL = 1e-9


class GeometryError(ValueError):
    pass


class GaugeValue(NamedTuple):
    value: float
    sign: int


@dataclass(frozen=True, eq=False)
class CenteredPolytope:
    """An H-polytope ``{x : A x <= b}`` with an interior point and radii.

    ``a0 + r*B_2 ⊆ K ⊆ a0 + R*B_2``.  Build instances with
    :meth:`from_hrep`, which computes any missing center or radius and
    checks the ones supplied.
    """

    A: QMatrix
    b: QVector
    a0: QVector
    r: float
    R: float

    @classmethod
    def from_hrep(cls, A, b, a0=None, r=None, R=None) -> "CenteredPolytope":
        Aq = qmat(A)
        bq = qvec(b)
        if not Aq or len(Aq) != len(bq):
            raise GeometryError("A and b must be non-empty with matching row counts")
        n = len(Aq[0])
        if any(all(v == 0 for v in row) for row in Aq):
            raise GeometryError("zero facet normal")
        if a0 is None:
            center, radius = chebyshev_center(np.array(Aq, float), np.array(bq, float))
            if radius <= 0:
                raise GeometryError("polytope has empty interior")
            a0q = qvec(center)
        else:
            a0q = qvec(a0)
        if len(a0q) != n:
            raise GeometryError("center has wrong dimension")
        slack = [bi - linalg.dot(ai, a0q) for ai, bi in zip(Aq, bq)]
        if min(slack) <= 0:
            raise GeometryError("center is not strictly interior")
        r_max = min(float(s) / math.hypot(*map(float, ai)) for s, ai in zip(slack, Aq))
        if r is not None:
            r = float(linalg.to_fraction(r))
        if R is not None:
            R = float(linalg.to_fraction(R))
        if r is None:
            r = r_max
        elif not 0 < float(r) <= r_max * (1 + REL_TOL):
            raise GeometryError(f"inner radius {r} exceeds facet distance {r_max}")
        poly = cls(Aq, bq, a0q, float(r), float("inf"))
        R_min = poly._outer_radius_about(np.array(a0q, float))
        if R is None:
            R = R_min
        elif float(R) < R_min * (1 - REL_TOL):
            raise GeometryError(f"outer radius {R} below vertex distance {R_min}")
        object.__setattr__(poly, "R", float(R))
        return poly

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "CenteredPolytope":
        lo, hi = qvec(lo), qvec(hi)
        n = len(lo)
        A = []
        b = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            A.append(e)
            b.append(hi[i])
            A.append([-v for v in e])
            b.append(-lo[i])
        return cls.from_hrep(A, b, a0=[(l + h) / 2 for l, h in zip(lo, hi)])

    @classmethod
    def from_dict(cls, data: dict) -> "CenteredPolytope":
        return cls.from_hrep(data["A"], data["b"], data.get("a0"), data.get("r"), data.get("R"))

    def to_dict(self) -> dict:
        return {
            "A": [[fmt_rational(v) for v in row] for row in self.A],
            "b": [fmt_rational(v) for v in self.b],
            "a0": [fmt_rational(v) for v in self.a0],
            "r": repr(self.r),
            "R": repr(self.R),
        }

    @property
    def dim(self) -> int:
        return len(self.A[0])

    @cached_property
    def A_f(self) -> np.ndarray:
        return np.array(self.A, dtype=float)

    @cached_property
    def b_f(self) -> np.ndarray:
        return np.array(self.b, dtype=float)

    @cached_property
    def a0_f(self) -> np.ndarray:
        return np.array(self.a0, dtype=float)

    @property
    def origin_interior(self) -> bool:
        return all(v > 0 for v in self.b)

    @cached_property
    def gauge_rows(self) -> np.ndarray:
        """Facet normals divided by their offsets; needs 0 in the interior."""
        if not self.origin_interior:
            raise GeometryError("origin is not interior (some b_i <= 0)")
        return self.A_f / self.b_f[:, None]

    @cached_property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.dim
        lo, hi = np.empty(n), np.empty(n)
        for i in range(n):
            c = np.zeros(n)
            c[i] = 1.0
            for sgn, out in ((1.0, lo), (-1.0, hi)):
                res = linprog(sgn * c, A_ub=self.A_f, b_ub=self.b_f, bounds=[(None, None)] * n, method="highs")
                if res.status == 3:
                    raise GeometryError("polytope is unbounded")
                if res.status != 0:
                    raise GeometryError(f"bounding-box LP failed: {res.message}")
                out[i] = res.x[i]
        return lo, hi

    @cached_property
    def vertices(self) -> np.ndarray:
        A, b = self.A_f, self.b_f
        m, n = A.shape
        if math.comb(m, n) > 20000:
            raise GeometryError("too many facet subsets for vertex enumeration")
        scale = 1.0 + np.abs(b).max()
        out = []
        for rows in itertools.combinations(range(m), n):
            sub = A[list(rows)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            v = np.linalg.solve(sub, b[list(rows)])
            if np.all(A @ v <= b + 1e-9 * scale):
                out.append(v)
        if not out:
            raise GeometryError("no vertices found")
        V = np.array(out)
        keep = []
        for v in V:
            if not any(np.allclose(v, w, atol=1e-10) for w in keep):
                keep.append(v)
        return np.array(keep)

    def _outer_radius_about(self, p: np.ndarray) -> float:
        """Certified upper bound on max_{x in K} ||x - p||_2."""
        lo, hi = self.bounding_box
        try:
            d = np.linalg.norm(self.vertices - p, axis=1).max()
        except GeometryError:
            corners = np.maximum(np.abs(lo - p), np.abs(hi - p))
            d = float(np.linalg.norm(corners))
        return float(d) * (1 + REL_TOL) + 1e-12

    @cached_property
    def origin_outradius(self) -> float:
        """Smallest certified R with K ⊆ R*B_2 about the origin."""
        return self._outer_radius_about(np.zeros(self.dim))

    @cached_property
    def origin_inradius(self) -> float:
        """Largest r with r*B_2 ⊆ K about the origin (0 must be interior)."""
        return float((self.b_f / np.linalg.norm(self.A_f, axis=1)).min())

    def contains(self, x, exact: bool = False) -> bool:
        if exact:
            xq = qvec(x)
            return all(linalg.dot(a, xq) <= bi for a, bi in zip(self.A, self.b))
        x = np.asarray(x, float)
        return bool(np.all(self.A_f @ x <= self.b_f + REL_TOL * (1 + np.abs(self.b_f))))

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        return np.all(X @ self.A_f.T <= self.b_f, axis=1)


def chebyshev_center(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed ball.

    The maximising center need not be unique (think of a long box); the one
    returned is the midpoint of the optimal set's bounding box when that
    point is itself optimal, else the mean of the box's 2n touching points.
    """
    m, n = A.shape
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if res.status == 3:
        raise GeometryError("polytope is unbounded")
    if res.status != 0:
        return np.zeros(n), 0.0
    radius = float(res.x[-1])
    if radius <= 0:
        return res.x[:n], radius
    # optimal set: A x <= b - radius*|a_i|, shrunk a hair so the LPs stay feasible
    b_star = b - norms * radius * (1 - 1e-9)
    extremes = []
    mid = np.empty(n)
    for i in range(n):
        for sign in (1.0, -1.0):
            obj = np.zeros(n)
            obj[i] = sign
            r2 = linprog(obj, A_ub=A, b_ub=b_star, bounds=[(None, None)] * n, method="highs")
            if r2.status != 0:
                return res.x[:n], radius
            extremes.append(r2.x)
        mid[i] = (extremes[-2][i] + extremes[-1][i]) / 2
    center = mid if np.all(A @ mid <= b_star + 1e-12) else np.mean(extremes, axis=0)
    return center, float(np.min((b - A @ center) / norms))


def gauge(C: CenteredPolytope, x) -> float | np.ndarray:
    """``inf{s >= 0 : x in sC}``; accepts one vector or an (N, n) batch."""
    G = C.gauge_rows
    X = np.asarray(x, float)
    vals = X @ G.T
    out = np.maximum(vals.max(axis=-1), 0.0)
    return float(out) if X.ndim == 1 else out


def gauge_exact(C: CenteredPolytope, x) -> Fraction:
    if not C.origin_interior:
        raise GeometryError("origin is not interior (some b_i <= 0)")
    xq = qvec(x)
    return max([Fraction(0)] + [linalg.dot(a, xq) / bi for a, bi in zip(C.A, C.b)])


def gauge_star(C: CenteredPolytope, x) -> GaugeValue:
    """``min(||x||_C, ||x||_{-C})`` and the side attaining it (ties go to +1)."""
    plus = gauge(C, x)
    minus = gauge(C, -np.asarray(x, float))
    return GaugeValue(plus, 1) if plus <= minus else GaugeValue(minus, -1)


def gauge_star_many(C: CenteredPolytope, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    plus = gauge(C, X)
    minus = gauge(C, -X)
    signs = np.where(plus <= minus, 1, -1)
    return np.minimum(plus, minus), signs


def recenter(K: CenteredPolytope, c) -> CenteredPolytope:
    """``K - c`` as a polytope with the origin as its center."""
    cq = qvec(c)
    if len(cq) != K.dim:
        raise GeometryError("center has wrong dimension")
    new_b = [bi - linalg.dot(ai, cq) for ai, bi in zip(K.A, K.b)]
    if min(new_b) <= 0:
        raise GeometryError("recentering point is not strictly interior")
    return CenteredPolytope.from_hrep(K.A, new_b, a0=[0] * K.dim)


def intersect_with_negation(C: CenteredPolytope) -> CenteredPolytope:
    if not C.origin_interior:
        raise GeometryError("origin is not interior (some b_i <= 0)")
    A = list(C.A) + [tuple(-v for v in row) for row in C.A]
    return CenteredPolytope.from_hrep(A, list(C.b) * 2, a0=[0] * C.dim)


def scale_about(K: CenteredPolytope, factor, center) -> CenteredPolytope:
    """``factor*K + (1 - factor)*center`` for ``factor > 0``."""
    f = linalg.to_fraction(factor)
    if f <= 0:
        raise GeometryError("scale factor must be positive")
    cq = qvec(center)
    new_b = [f * bi + (1 - f) * linalg.dot(ai, cq) for ai, bi in zip(K.A, K.b)]
    a0 = [f * a + (1 - f) * c for a, c in zip(K.a0, cq)]
    return CenteredPolytope.from_hrep(K.A, new_b, a0=a0)


def centroid(K: CenteredPolytope) -> np.ndarray:
    """Exact-in-floating-point barycenter via a Delaunay triangulation."""
    V = K.vertices
    if K.dim == 1:
        return np.array([(V.min() + V.max()) / 2])
    from scipy.spatial import Delaunay

    tri = Delaunay(V)
    simp = V[tri.simplices]
    vols = np.abs(np.linalg.det(simp[:, 1:, :] - simp[:, :1, :]))
    cents = simp.mean(axis=1)
    return (vols[:, None] * cents).sum(axis=0) / vols.sum()


def volume_ratio_estimate(C: CenteredPolytope, sample_count: int, seed: int = 0) -> tuple[float, float]:
    """MC estimate of vol(C ∩ -C)/vol(C) and its standard error."""
    from gaugesieve.sampling import PolytopeSampler, SamplerConfig

    if sample_count <= 0:
        raise ValueError("sample_count must be positive")
    X = PolytopeSampler(C, SamplerConfig(seed=seed)).sample_many(sample_count)
    hits = C.contains_many(-X)
    p = float(hits.mean())
    return p, math.sqrt(max(p * (1 - p), 0.0) / sample_count)


def estimate_gamma(C: CenteredPolytope, sample_count: int = 100_000, seed: int = 0) -> float:
    """Monte-Carlo estimate of ``(vol(C ∩ -C) / vol(C))^(1/n)``."""
    p, _ = volume_ratio_estimate(C, sample_count, seed)
    if p == 0:
        # no sample hit; report the resolution limit rather than zero
        p = 1.0 / sample_count
    return p ** (1.0 / C.dim)


def barycenter_approx(
    K: CenteredPolytope, eps: float, seed: int = 0, c: float = 4.0, sampler_cfg=None
) -> np.ndarray:
    """Average of ``ceil(c n^2 / eps^2)`` near-uniform samples from K."""
    from gaugesieve.sampling import PolytopeSampler, SamplerConfig

    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    n = K.dim
    cfg = sampler_cfg or SamplerConfig(seed=seed, eta=4.0**-n)
    N = math.ceil(c * n * n / eps**2)
    b = PolytopeSampler(K, cfg).sample_many(N).mean(axis=0)
    if not np.all(K.A_f @ b < K.b_f):
        raise GeometryError("sample mean left the interior; K is degenerate")
    return b


def facet_minima(K: CenteredPolytope) -> np.ndarray:
    """``min_{x in K} <a_i, x>`` for every facet row, by LP."""
    n = K.dim
    out = np.empty(len(K.A))
    for i, row in enumerate(K.A_f):
        res = linprog(row, A_ub=K.A_f, b_ub=K.b_f, bounds=[(None, None)] * n, method="highs")
        if res.status != 0:
            raise GeometryError(f"facet LP failed: {res.message}")
        out[i] = res.fun
    return out

