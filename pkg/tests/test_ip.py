import math
from fractions import Fraction

import numpy as np
import pytest

from gaugesieve.geometry import CenteredPolytope, gauge_exact, recenter
from gaugesieve.ip import (
    IPStatus,
    OptStatus,
    approx_ip,
    approx_opt,
    blowup_membership,
    ip_gauge_test,
    iteration_cap,
    objective_bounds,
    repeat_count,
    restrict,
)
from gaugesieve.instances import generate
from gaugesieve.sieve import SieveConfig

CFG = SieveConfig(seed=0, max_pairs=4000)
UNIT = CenteredPolytope.box([0, 0], [1, 1])


def box(lo, hi):
    return CenteredPolytope.box(lo, hi)


def test_deep_point_is_found(z2):
    res = approx_ip(box(["-3/5", "-3/5"], ["3/5", "3/5"]), z2, 0.5, CFG)
    assert res.status is IPStatus.FOUND_IN_K and res.point == (0, 0)
    assert res.blowup_gauge <= 1


def test_integer_free_blowup_is_empty(z2):
    res = approx_ip(box(["1/5", "1/5"], ["4/5", "4/5"]), z2, 0.5, CFG)
    assert res.status is IPStatus.EMPTY and res.point is None


def test_found_point_is_in_analytic_blowup(z2):
    K = box(["-7/10", "1/5"], ["3/10", "13/10"])
    res = approx_ip(K, z2, 0.5, CFG)
    assert res.found
    assert ip_gauge_test(K, res.barycenter, res.point, 0.5)
    centre = [Fraction(-1, 5), Fraction(3, 4)]
    g = gauge_exact(recenter(K, centre), [p - c for p, c in zip(res.point, centre)])
    assert g <= Fraction(3, 2)


def test_gauge_test_boundary():
    K = box([-1, -1], [1, 1])
    assert ip_gauge_test(K, [0, 0], ["11/8", 0], 0.5)
    assert not ip_gauge_test(K, [0, 0], ["7/5", 0], 0.5)


def test_objective_bounds_examples():
    lo, hi = objective_bounds(UNIT, [1, 1])
    assert lo == pytest.approx([0, 0]) and hi == pytest.approx([1, 1])
    lo, hi = objective_bounds(UNIT, [1, -1])
    assert lo == pytest.approx([0, 1]) and hi == pytest.approx([1, 0])


def test_objective_variation_bounded_by_diameter():
    K = CenteredPolytope.from_hrep([[1, 2], [-1, 0], [0, -1], [1, -1]], [4, 1, 1, 2])
    v = np.array([3.0, -1.0])
    lo, hi = objective_bounds(K, v)
    assert v @ hi - v @ lo <= 2 * K.R * np.linalg.norm(v) + 1e-9


def test_restrict_examples():
    S = restrict(UNIT, [1, 0], 0.25, 0.75)
    lo, hi = S.bounding_box
    assert lo == pytest.approx([0.25, 0]) and hi == pytest.approx([0.75, 1])
    assert np.array(S.a0, float) == pytest.approx([0.5, 0.5])
    assert S.r > 0
    assert restrict(UNIT, [1, 0], 2, 3) is None


def test_blowup_membership_examples():
    assert blowup_membership(UNIT, 0.5, ["1/2", "1/3"])
    assert blowup_membership(UNIT, 0.5, ["3/2", "1/2"])
    assert not blowup_membership(UNIT, 0.5, ["8/5", "1/2"])
    assert blowup_membership(UNIT, 0, [1, 1])
    assert not blowup_membership(UNIT, 0, ["101/100", 1])


def test_iteration_and_repeat_counts():
    assert iteration_cap(2.0, 1.0, 0.1) == math.ceil(math.log(80) / math.log(4 / 3))
    assert repeat_count(2, 1.0, 1.0, 0.5) == 1
    assert repeat_count(2, 100.0, 1.0, 0.01) == math.ceil(1 + math.log(math.log(10_000)) / 2)


def test_approx_opt_example(z2):
    K = box(["-3/5", "-3/5"], ["13/5", "3/5"])
    res = approx_opt(K, z2, [1, 0], 0.5, 0.1, CFG)
    assert res.status is OptStatus.SOLVED
    assert res.value >= Fraction(19, 10)
    assert blowup_membership(K, 0.5, res.point)
    assert all(c <= 0.75 + 1e-12 for c in res.contractions)
    assert res.bracket[1] - res.bracket[0] <= 0.1


def test_approx_opt_empty(z2):
    res = approx_opt(box(["1/5", "1/5"], ["4/5", "4/5"]), z2, [1, 2], 0.5, 0.1, CFG)
    assert res.status is OptStatus.EMPTY and res.point is None


def test_approx_opt_validates_arguments(z2):
    with pytest.raises(ValueError):
        approx_opt(UNIT, z2, [0, 0], 0.5, 0.1, CFG)
    with pytest.raises(ValueError):
        approx_opt(UNIT, z2, [1, 0], 0.7, 0.1, CFG)


def test_completed_sieve_without_candidate_is_empty():
    inst = generate("empty-ip", 2, 5000)
    res = approx_ip(inst.body, inst.lattice, 0.5, SieveConfig(seed=0, max_pairs=20000))
    assert res.stats["cvp_status"] == "NOT_FOUND"
    assert res.status is IPStatus.EMPTY


def test_starved_sieve_is_not_reported_empty():
    inst = generate("planted-ip", 2, 4003)
    res = approx_ip(inst.body, inst.lattice, 0.5, SieveConfig(seed=0, max_pairs=3))
    assert res.status in (IPStatus.BUDGET_EXHAUSTED, IPStatus.FOUND_IN_K, IPStatus.FOUND_IN_BLOWUP)
