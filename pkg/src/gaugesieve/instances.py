"""Instance files and seeded generators for test corpora.

Every generator draws from ``make_rng(seed, stream)`` only, so the same
arguments always give the same instance.  The planted kinds certify their
label with the enumeration oracle before returning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from gaugesieve.geometry import CenteredPolytope, GeometryError, centroid, estimate_gamma, scale_about
from gaugesieve.lattice import LatticeBasis, Subspace
from gaugesieve.linalg import QVector, det, fmt_rational, qvec
from gaugesieve.oracle import cvp_brute, ip_brute, svp_brute
from gaugesieve.sampling import make_rng

GENERATOR_KINDS = ("random-cvp", "planted-cvp", "random-sap", "planted-ip", "empty-ip")
MAX_TRIES = 1000


class InstanceError(ValueError):
    pass


@dataclass
class Instance:
    body: CenteredPolytope
    lattice: LatticeBasis
    target: Optional[QVector] = None
    subspace: Optional[Subspace] = None
    objective: Optional[QVector] = None
    delta: Optional[Fraction] = None
    params: dict[str, Any] = field(default_factory=dict)
    kind: Optional[str] = None

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def to_dict(self) -> dict:
        out: dict[str, Any] = {}
        if self.kind:
            out["kind"] = self.kind
        out["body"] = self.body.to_dict()
        out["lattice"] = self.lattice.to_dict()
        if self.target is not None:
            out["target"] = [fmt_rational(v) for v in self.target]
        if self.subspace is not None:
            out["subspace"] = self.subspace.to_dict()
        if self.objective is not None:
            out["objective"] = {"v": [fmt_rational(v) for v in self.objective]}
            if self.delta is not None:
                out["objective"]["delta"] = fmt_rational(self.delta)
        if self.params:
            out["params"] = self.params
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            body = CenteredPolytope.from_dict(data["body"])
            lattice = LatticeBasis.from_dict(data["lattice"])
        except KeyError as exc:
            raise InstanceError(f"missing field {exc}") from None
        n = lattice.dim
        if body.dim != n:
            raise InstanceError(f"body dimension {body.dim} does not match lattice dimension {n}")
        target = qvec(data["target"]) if data.get("target") is not None else None
        if target is not None and len(target) != n:
            raise InstanceError("target has wrong dimension")
        subspace = Subspace.from_dict(data["subspace"], n) if data.get("subspace") is not None else None
        objective = delta = None
        if data.get("objective") is not None:
            objective = qvec(data["objective"]["v"])
            if len(objective) != n:
                raise InstanceError("objective has wrong dimension")
            if data["objective"].get("delta") is not None:
                delta = qvec([data["objective"]["delta"]])[0]
        return cls(body, lattice, target, subspace, objective, delta, dict(data.get("params", {})), data.get("kind"))

    @classmethod
    def loads(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


def _grid(x: float, denom: int) -> Fraction:
    return Fraction(round(x * denom), denom)


def random_basis(n: int, rng: np.random.Generator, bound: int = 3) -> LatticeBasis:
    """Integer basis with entries in ``[-bound, bound]`` and non-zero determinant."""
    for _ in range(MAX_TRIES):
        M = rng.integers(-bound, bound + 1, size=(n, n))
        Mq = tuple(tuple(Fraction(int(v)) for v in row) for row in M)
        if det(Mq) != 0:
            return LatticeBasis(Mq)
    raise InstanceError("could not draw a non-singular basis")


def random_body(n: int, rng: np.random.Generator, min_gamma: float = 0.5, gamma_samples: int = 4000) -> CenteredPolytope:
    """Random polytope containing the origin with estimated symmetry >= min_gamma."""
    for _ in range(MAX_TRIES):
        m = int(rng.integers(n + 2, 2 * n + 4))
        normals = rng.standard_normal((m, n))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = rng.uniform(0.5, 2.0, size=m)
        A = [[_grid(v, 8) for v in row] for row in normals]
        if any(all(v == 0 for v in row) for row in A):
            continue
        b = [_grid(v, 8) for v in offsets]
        try:
            C = CenteredPolytope.from_hrep(A, b)
            C.bounding_box
        except GeometryError:
            continue
        if not C.origin_interior:
            continue
        if estimate_gamma(C, gamma_samples, seed=int(rng.integers(2**31))) >= min_gamma:
            return C
    raise InstanceError("could not draw a bounded body with the requested symmetry")


def standard_body(name: str, n: int, rng: np.random.Generator) -> CenteredPolytope:
    if name == "cube":
        return CenteredPolytope.box([-1] * n, [1] * n)
    if name == "skew":
        return CenteredPolytope.box([-1] * n, [2] * n)
    if name == "random":
        return random_body(n, rng)
    raise InstanceError(f"unknown body {name!r}")


def random_subspace(n: int, rng: np.random.Generator, dim: int = 1) -> Subspace:
    for _ in range(MAX_TRIES):
        V = rng.integers(-3, 4, size=(dim, n))
        if np.linalg.matrix_rank(V) == dim:
            return Subspace.spanned_by(V.tolist())
    raise InstanceError("could not draw a subspace")


def random_target(B: LatticeBasis, rng: np.random.Generator, denom: int = 64) -> QVector:
    """Uniform point of the box twice the size of the fundamental cell's bounding box."""
    corners = np.array(np.meshgrid(*[[0, 1]] * B.dim, indexing="ij")).reshape(B.dim, -1).T @ B.B_f.T
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    mid, half = (lo + hi) / 2, (hi - lo)
    x = mid + half * rng.uniform(-1, 1, size=B.dim)
    return tuple(_grid(v, denom) for v in x)


def _body_name(i: int, bodies: tuple[str, ...]) -> str:
    return bodies[i % len(bodies)]


def gen_random_cvp(n: int, seed: int, body: str = "cube") -> Instance:
    rng = make_rng(seed, (1,))
    C = standard_body(body, n, rng)
    B = random_basis(n, rng)
    return Instance(C, B, target=random_target(B, rng), kind="random-cvp", params={"seed": seed})


def gen_planted_cvp(n: int, seed: int, body: str = "cube", t: int = 2) -> Instance:
    """Target with ``d_C(L, x) <= t * lambda_1``, certified by the oracles."""
    rng = make_rng(seed, (2,))
    for _ in range(MAX_TRIES):
        C = standard_body(body, n, rng)
        B = random_basis(n, rng)
        x = random_target(B, rng)
        d = cvp_brute(C, B, x).value
        lam = svp_brute(C, B).value
        if 0 < d <= t * lam:
            return Instance(C, B, target=x, kind="planted-cvp", params={"seed": seed, "exact_t": t})
    raise InstanceError("could not plant a CVP instance")


def gen_random_sap(n: int, seed: int, body: str = "cube") -> Instance:
    rng = make_rng(seed, (3,))
    C = standard_body(body, n, rng)
    B = random_basis(n, rng)
    return Instance(C, B, subspace=random_subspace(n, rng), kind="random-sap", params={"seed": seed})


def _box_like(n: int, rng: np.random.Generator, scale: tuple[float, float]) -> CenteredPolytope:
    C = random_body(n, rng)
    s = _grid(rng.uniform(*scale), 16)
    shift = [_grid(v, 16) for v in rng.uniform(-3, 3, size=n)]
    A = C.A
    b = [s * bi + sum(a * c for a, c in zip(ai, shift)) for ai, bi in zip(A, C.b)]
    return CenteredPolytope.from_hrep(A, b)


def _centroid_q(K: CenteredPolytope) -> QVector:
    return qvec(centroid(K))


def deep_point(K: CenteredPolytope, B: LatticeBasis, eps: float) -> Optional[QVector]:
    """A lattice point of ``K/(1+eps) + eps b(K)/(1+eps)``, if any."""
    shrunk = scale_about(K, Fraction(1) / (1 + Fraction(eps)), _centroid_q(K))
    return ip_brute(shrunk, B)


def blowup_point(K: CenteredPolytope, B: LatticeBasis, eps: float) -> Optional[QVector]:
    """A lattice point of ``(1+eps) K - eps b(K)``, if any."""
    grown = scale_about(K, 1 + Fraction(eps), _centroid_q(K))
    return ip_brute(grown, B)


def gen_planted_ip(n: int, seed: int, eps: float = 0.5) -> Instance:
    rng = make_rng(seed, (4,))
    for _ in range(MAX_TRIES):
        B = random_basis(n, rng, bound=2)
        K = _box_like(n, rng, (0.8, 2.0))
        if deep_point(K, B, eps) is not None:
            return Instance(K, B, kind="planted-ip", params={"seed": seed, "eps": eps})
    raise InstanceError("could not plant a feasible IP instance")


def gen_empty_ip(n: int, seed: int, eps: float = 0.5) -> Instance:
    rng = make_rng(seed, (5,))
    for _ in range(MAX_TRIES):
        B = random_basis(n, rng, bound=2)
        K = _box_like(n, rng, (0.1, 0.35))
        if blowup_point(K, B, eps) is None:
            return Instance(K, B, kind="empty-ip", params={"seed": seed, "eps": eps})
    raise InstanceError("could not draw an integer-free IP instance")


def generate(kind: str, n: int, seed: int, body: str = "cube", eps: float = 0.5) -> Instance:
    if kind in ("planted-ip", "empty-ip", "planted-cvp") and n > 6:
        raise InstanceError("planted kinds support n <= 6")
    if kind == "random-cvp":
        return gen_random_cvp(n, seed, body)
    if kind == "planted-cvp":
        return gen_planted_cvp(n, seed, body)
    if kind == "random-sap":
        return gen_random_sap(n, seed, body)
    if kind == "planted-ip":
        return gen_planted_ip(n, seed, eps)
    if kind == "empty-ip":
        return gen_empty_ip(n, seed, eps)
    raise InstanceError(f"unknown generator kind {kind!r}")
