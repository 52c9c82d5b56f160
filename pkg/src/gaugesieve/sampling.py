"""Seeded near-uniform sampling from H-polytopes.

Rejection from the LP bounding box is exact (total variation 0) and is the
default.  Hit-and-run is available for bodies where the box is a poor
envelope; its ``eta`` is a documented target, not a certified bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from gaugesieve.geometry import CenteredPolytope


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    eta: float = 1e-3
    seed: int = 0
    method: Literal["rejection", "hit-and-run"] = "rejection"
    burn_in: int = 200
    thinning: int = 10
    max_draws: int = 50_000_000

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.burn_in < 1 or self.thinning < 1:
            raise ValueError("burn_in and thinning must be >= 1")
        if self.method not in ("rejection", "hit-and-run"):
            raise ValueError(f"unknown sampler method {self.method!r}")


def make_rng(seed: int, stream: tuple[int, ...] = ()) -> np.random.Generator:
    """Independent generator for a (seed, stream-id) pair."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream)))


class PolytopeSampler:
    """Owns one RNG stream; use one instance per thread."""

    def __init__(self, K: CenteredPolytope, cfg: SamplerConfig | None = None, stream: tuple[int, ...] = ()):
        self.K = K
        self.cfg = cfg or SamplerConfig()
        self.rng = make_rng(self.cfg.seed, stream)
        self._chain: np.ndarray | None = None

    def sample(self) -> np.ndarray:
        return self.sample_many(1)[0]

    def sample_many(self, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("count must be non-negative")
        if self.cfg.method == "rejection":
            return self._rejection(count)
        return self._hit_and_run(count)

    def _rejection(self, count: int) -> np.ndarray:
        lo, hi = self.K.bounding_box
        n = self.K.dim
        out = np.empty((count, n))
        filled = 0
        draws = 0
        batch = max(1024, 2 * count)
        while filled < count:
            if draws >= self.cfg.max_draws:
                raise SamplingError(
                    f"rejection budget exhausted after {draws} draws ({filled}/{count} accepted)"
                )
            X = lo + (hi - lo) * self.rng.random((batch, n))
            draws += batch
            X = X[self.K.contains_many(X)]
            take = min(len(X), count - filled)
            out[filled : filled + take] = X[:take]
            filled += take
            if len(X) and filled < count:
                # resize the batch to the observed acceptance rate
                rate = len(X) / batch
                batch = int(min(max(1024, 1.2 * (count - filled) / rate), 4_000_000))
        return out

    def _hit_and_run(self, count: int) -> np.ndarray:
        A, b = self.K.A_f, self.K.b_f
        n = self.K.dim
        if self._chain is None:
            self._chain = self.K.a0_f.copy()
            for _ in range(self.cfg.burn_in):
                self._step(A, b, n)
        out = np.empty((count, n))
        for i in range(count):
            for _ in range(self.cfg.thinning):
                self._step(A, b, n)
            out[i] = self._chain
        return out

    def _step(self, A, b, n):
        x = self._chain
        d = self.rng.standard_normal(n)
        d /= np.linalg.norm(d)
        Ad = A @ d
        slack = b - A @ x
        with np.errstate(divide="ignore"):
            t = slack / Ad
        tmax = t[Ad > 0].min()
        tmin = t[Ad < 0].max()
        if not (np.isfinite(tmax) and np.isfinite(tmin)) or tmin > tmax:
            raise SamplingError("hit-and-run chord is degenerate; is the body bounded?")
        self._chain = x + self.rng.uniform(tmin, tmax) * d


def uniform_sample(K: CenteredPolytope, cfg: SamplerConfig | None = None) -> np.ndarray:
    return PolytopeSampler(K, cfg).sample()


def sample_signed(C: CenteredPolytope, beta: float, cfg: SamplerConfig | None = None):
    """``(s*X, s)`` with X near-uniform on ``beta*C`` and s a fair sign."""
    sampler = PolytopeSampler(C, cfg)
    x, s = signed_batch(sampler, beta, 1)
    return x[0], int(s[0])


def signed_batch(sampler: PolytopeSampler, beta: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    if beta <= 0:
        raise ValueError("beta must be positive")
    X = beta * sampler.sample_many(count)
    s = np.where(sampler.rng.random(count) < 0.5, -1, 1)
    return s[:, None] * X, s
