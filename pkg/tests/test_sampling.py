import numpy as np
import pytest
from scipy import stats

from gaugesieve.geometry import CenteredPolytope, gauge_star_many
from gaugesieve.sampling import (
    PolytopeSampler,
    SamplerConfig,
    SamplingError,
    make_rng,
    sample_signed,
    signed_batch,
    uniform_sample,
)

TRIANGLE = CenteredPolytope.from_hrep([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])


def test_samples_satisfy_constraints():
    K = CenteredPolytope.box([0, 0, 0], [1, 1, 1])
    X = PolytopeSampler(K, SamplerConfig(seed=3)).sample_many(2000)
    assert np.all(X @ K.A_f.T <= K.b_f)
    assert K.contains(uniform_sample(K, SamplerConfig(seed=1)))


def test_simplex_mean():
    X = PolytopeSampler(TRIANGLE, SamplerConfig(seed=5)).sample_many(100_000)
    assert X.mean(axis=0) == pytest.approx([1 / 3, 1 / 3], abs=0.01)


def test_determinism():
    a = PolytopeSampler(TRIANGLE, SamplerConfig(seed=9)).sample_many(50)
    b = PolytopeSampler(TRIANGLE, SamplerConfig(seed=9)).sample_many(50)
    c = PolytopeSampler(TRIANGLE, SamplerConfig(seed=10)).sample_many(50)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_streams_are_independent():
    a = make_rng(1, (0,)).random(4)
    b = make_rng(1, (1,)).random(4)
    assert not np.array_equal(a, b)


def test_chi_square_uniformity_on_box():
    K = CenteredPolytope.box([0, 0], [2, 1])
    X = PolytopeSampler(K, SamplerConfig(seed=2)).sample_many(20_000)
    counts, _, _ = np.histogram2d(X[:, 0], X[:, 1], bins=[8, 4], range=[[0, 2], [0, 1]])
    assert stats.chisquare(counts.ravel()).pvalue > 0.01


def test_hit_and_run_stays_inside_and_roughly_uniform():
    cfg = SamplerConfig(seed=4, method="hit-and-run", burn_in=100, thinning=5)
    X = PolytopeSampler(TRIANGLE, cfg).sample_many(20_000)
    assert np.all(X @ TRIANGLE.A_f.T <= TRIANGLE.b_f + 1e-12)
    assert X.mean(axis=0) == pytest.approx([1 / 3, 1 / 3], abs=0.03)


def test_signed_samples_stay_in_scaled_union():
    C = CenteredPolytope.box([-1, -1], [2, 2])
    X, s = signed_batch(PolytopeSampler(C, SamplerConfig(seed=1)), 0.7, 5000)
    vals, _ = gauge_star_many(C, X)
    assert np.all(vals <= 0.7 * (1 + 1e-12))
    assert set(np.unique(s)) == {-1, 1}


def test_signed_sample_tail_probability():
    C = CenteredPolytope.box([-1], [2])
    X, _ = signed_batch(PolytopeSampler(C, SamplerConfig(seed=11)), 1.0, 100_000)
    assert np.mean(X[:, 0] > 1) == pytest.approx(1 / 6, abs=0.01)


def test_sample_signed_single():
    C = CenteredPolytope.box([-1, -1], [1, 1])
    x, s = sample_signed(C, 0.5, SamplerConfig(seed=0))
    assert s in (-1, 1) and np.max(np.abs(x)) <= 0.5


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(eta=0)
    with pytest.raises(ValueError):
        SamplerConfig(burn_in=0)
    with pytest.raises(ValueError):
        SamplerConfig(method="gibbs")


def test_rejection_budget_is_reported():
    K = CenteredPolytope.from_hrep([[1, 1], [-1, -1], [1, -1], [-1, 1]], ["1/1000", "1/1000", 10, 10])
    with pytest.raises(SamplingError):
        PolytopeSampler(K, SamplerConfig(seed=0, max_draws=2000)).sample_many(10_000)
