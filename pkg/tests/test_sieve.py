import math

import numpy as np
import pytest

from gaugesieve.geometry import CenteredPolytope, gauge, gauge_star_many
from gaugesieve.lattice import LatticeBasis, Subspace, in_lattice, in_subspace
from gaugesieve.report import BudgetExhausted, SolveStatus
from gaugesieve.sieve import (
    PairList,
    SieveConfig,
    SieveInvariantError,
    SievePair,
    approx_sap,
    basic_sieve,
    exact_sap,
    lambda_bounds,
    max_stage_count,
    pair_budget,
    short_vectors,
)

LINE = CenteredPolytope.box([-1], [1])
Z1 = LatticeBasis.identity(1)
E1 = Subspace.spanned_by([[1, 0]])


def pairs_1d(xs, ys):
    return PairList.from_pairs([SievePair(np.array([x]), np.array([y])) for x, y in zip(xs, ys)], Z1)


def test_single_pair_becomes_a_centre():
    out = basic_sieve(pairs_1d([0.1], [3.1]), LINE, 0.25, 4)
    assert list(out.centers) == [0] and len(out.clustered) == 0


def test_hand_traced_clustering():
    out = basic_sieve(pairs_1d([0.0, -0.1, 0.1], [3.0, 2.9, -2.9]), LINE, 0.25, 4)
    assert list(out.centers) == [0, 2]
    assert list(out.assignment) == [0, 0, 2]
    (y,) = out.clustered.y
    assert y == pytest.approx([-0.1])
    assert abs(y[0]) <= 4 / 2 + 0.25
    assert out.clustered.x[0] == pytest.approx([-0.1])


def test_clustered_count_is_population_minus_centres():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.25, 0.25, 200)
    k = rng.integers(-3, 4, 200)
    out = basic_sieve(pairs_1d(x, x + k), LINE, 0.25, 4)
    assert len(out.clustered) == 200 - len(out.centers)


def test_matches_one_pair_at_a_time_scan():
    C = CenteredPolytope.box([-1, -1], [2, 2])
    B = LatticeBasis.from_columns([[2, 1], [0, 3]])
    rng = np.random.default_rng(1)
    X = rng.uniform(-0.3, 0.3, (300, 2))
    coeffs = -np.floor(X @ B.Binv_f.T).astype(np.int64)
    pl = PairList(B, X, coeffs)
    D = 2 * float(gauge(C, B.B_f.T).max())
    out = basic_sieve(pl, C, 0.6, D)

    Y = pl.y
    _, signs = gauge_star_many(C, X)
    centres = []
    for i in range(len(X)):
        for j in centres:
            if gauge(C, signs[j] * (Y[i] - Y[j])) <= D / 2:
                break
        else:
            centres.append(i)
    assert list(out.centers) == centres


def test_invariant_violations_name_the_pair():
    with pytest.raises(SieveInvariantError, match="pair 1"):
        basic_sieve(pairs_1d([0.0, 0.5], [1.0, 1.5]), LINE, 0.25, 4)
    with pytest.raises(SieveInvariantError, match="pair 0"):
        basic_sieve(pairs_1d([0.0], [5.0]), LINE, 0.25, 4)


def test_pair_list_rejects_non_lattice_difference():
    with pytest.raises(SieveInvariantError):
        pairs_1d([0.1], [0.6])


def test_clustered_pairs_keep_lattice_invariant():
    C = CenteredPolytope.box([-1, -1], [2, 2])
    B = LatticeBasis.from_columns([[2, 1], [-1, 2]])
    rng = np.random.default_rng(2)
    X = rng.uniform(-0.3, 0.3, (400, 2))
    pl = PairList(B, X, -np.floor(X @ B.Binv_f.T).astype(np.int64))
    D = 2 * float(gauge(C, B.B_f.T).max())
    out = basic_sieve(pl, C, 0.6, D)
    for x, y in zip(out.clustered.x, out.clustered.y):
        assert np.allclose(B.Binv_f @ (y - x), np.rint(B.Binv_f @ (y - x)))
    ys, _ = gauge_star_many(C, out.clustered.y)
    assert np.all(ys <= D / 2 + 0.6 + 1e-9)


def test_pair_budget_formula():
    assert pair_budget(2, 1.0, 0.5, 2.0, 0.8) == pytest.approx(4 * 6 * 400 + 8 * 72**2)
    assert max_stage_count(2.0, 0.8) == 6


def test_lambda_bounds_example(cube2, z2):
    lb = lambda_bounds(cube2, z2, E1)
    assert lb.nu == pytest.approx(1 / math.sqrt(2))
    assert lb.nu <= 1 <= lb.ratio * lb.nu
    assert lb.guess_count == math.ceil(math.log(math.sqrt(2)) / math.log(1.5)) + 1


def test_lambda_bounds_scale(cube2):
    B = LatticeBasis.from_columns([[2, 1], [-1, 1]])
    assert lambda_bounds(cube2, B.scaled(2), E1).nu == pytest.approx(2 * lambda_bounds(cube2, B, E1).nu)
    assert lambda_bounds(cube2, B, Subspace.zero(2)).nu > 0


@pytest.fixture
def sv_run(cube2):
    B = LatticeBasis.from_columns([[3, 1], [1, 2]])
    cfg = SieveConfig(seed=4, max_pairs=4000, gamma=1.0)
    return B, short_vectors(cube2, B, E1, 0.5, 0.5, cfg, keep_trace=True)


def test_short_vectors_output_in_lattice_and_off_subspace(sv_run):
    B, res = sv_run
    for v in res.vectors()[:200]:
        assert in_lattice(B, v) and not in_subspace(E1, v)


def test_short_vectors_stage_bound(sv_run):
    _, res = sv_run
    assert res.stats["stages"] <= max_stage_count(res.stats["D0"], 0.5)
    assert res.stats["stages"] >= 1


def test_x_values_never_change(sv_run):
    _, res = sv_run
    initial = {tuple(x) for x in res.trace[0].x}
    for stage in res.trace[1:]:
        assert {tuple(x) for x in stage.x} <= initial


def test_short_vectors_exhaustion(cube2):
    B = LatticeBasis.from_columns([[5, 0], [0, 5]])
    with pytest.raises(BudgetExhausted):
        short_vectors(cube2, B, E1, 0.2, 0.5, SieveConfig(max_pairs=3, gamma=1.0))


def test_short_vectors_frequency_at_full_budget(cube2, z2):
    hits = 0
    for seed in range(50):
        res = short_vectors(cube2, z2, E1, 0.8, 0.5, SieveConfig(seed=seed, gamma=1.0))
        best = res.shortest(cube2)
        hits += best is not None and best.value <= 1.5
    assert hits >= 48


def test_approx_sap_examples(cube2, skew2, z2):
    rep = approx_sap(cube2, z2, E1, 0.5, SieveConfig(seed=1, gamma=1.0))
    assert rep.status is SolveStatus.OK and 1 <= rep.value <= 1.5
    assert in_lattice(z2, rep.vector) and not in_subspace(E1, rep.vector)
    rep = approx_sap(skew2, z2, E1, 0.5, SieveConfig(seed=1))
    assert rep.found and 0.5 <= rep.value <= 0.75


def test_single_survivor_is_not_found_rather_than_exhausted(cube2):
    B = LatticeBasis.from_columns([[5, 0], [0, 5]])
    rep = approx_sap(cube2, B, E1, 0.5, SieveConfig(max_pairs=1, gamma=1.0))
    assert rep.status is SolveStatus.NOT_FOUND


def test_approx_sap_reports_exhaustion(cube2):
    B = LatticeBasis.from_columns([[5, 1], [4, 1]])
    rep = approx_sap(cube2, B, E1, 0.5, SieveConfig(max_pairs=1, gamma=1.0))
    assert rep.status is SolveStatus.BUDGET_EXHAUSTED and not rep.found


def test_exact_sap_uses_reciprocal_eps(cube2, z2):
    rep = exact_sap(cube2, z2, E1, 2, SieveConfig(seed=2, gamma=1.0))
    assert rep.params["eps"] == 0.5 and rep.params["t"] == 2
    assert rep.value == 1 and not in_subspace(E1, rep.vector)


def test_sap_reproducible(skew2, z2):
    a = approx_sap(skew2, z2, E1, 0.5, SieveConfig(seed=5, max_pairs=2000))
    b = approx_sap(skew2, z2, E1, 0.5, SieveConfig(seed=5, max_pairs=2000))
    assert a.to_dict() == b.to_dict()


def test_config_validation():
    with pytest.raises(ValueError):
        SieveConfig(budget_multiplier=0)
    with pytest.raises(ValueError):
        SieveConfig(gamma=1.5)
