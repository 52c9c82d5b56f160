from fractions import Fraction

import numpy as np
import pytest

from gaugesieve.geometry import CenteredPolytope, gauge_exact
from gaugesieve.instances import random_basis, standard_body
from gaugesieve.lattice import LatticeBasis, Subspace
from gaugesieve.oracle import (
    OracleCapError,
    cvp_brute,
    enumeration_bound,
    ip_brute,
    ip_points,
    sap_brute,
    svp_brute,
)
from gaugesieve.sampling import make_rng


def test_cvp_examples(cube2, skew2, z2):
    res = cvp_brute(cube2, z2, ["2/5", "3/10"])
    assert res.vector == (0, 0) and res.value == Fraction(2, 5)
    res = cvp_brute(cube2, z2, [3, -1])
    assert res.vector == (3, -1) and res.value == 0
    res = cvp_brute(skew2, z2, ["9/10", 0])
    assert res.vector == (1, 0) and res.value == Fraction(1, 20)


def test_sap_examples(cube2, skew2, z2):
    e1 = Subspace.spanned_by([[1, 0]])
    res = sap_brute(cube2, z2, e1)
    assert res.value == 1 and res.vector in [(0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)]
    assert res.vector[1] != 0
    res = sap_brute(skew2, z2, e1)
    assert res.value == Fraction(1, 2) and res.vector[1] == 1


def test_svp_examples(cube2, skew2, z2):
    assert svp_brute(cube2, LatticeBasis.identity(2, 2)).value == 2
    assert svp_brute(cube2, z2).value == 1
    res = svp_brute(skew2, z2)
    assert res.value == Fraction(1, 2)
    assert gauge_exact(skew2, res.vector) == Fraction(1, 2)


def test_svp_is_sap_with_zero_subspace(skew2):
    B = LatticeBasis.from_columns([[2, 1], [-1, 3]])
    assert svp_brute(skew2, B) == sap_brute(skew2, B, Subspace.zero(2))


def test_ip_examples(z2):
    assert ip_brute(CenteredPolytope.box(["1/5", "1/5"], ["4/5", "4/5"]), z2) is None
    assert ip_brute(CenteredPolytope.box(["-3/5", "-3/5"], ["3/5", "3/5"]), z2) == (0, 0)
    K = CenteredPolytope.from_hrep([[1, 1], [-1, 0], [0, -1]], ["3/2", 0, 0])
    assert ip_brute(K, z2) in [(0, 0), (1, 0), (0, 1)]
    assert sorted(ip_points(K, z2)) == [(0, 0), (0, 1), (1, 0)]


def test_dimension_cap(cube2):
    C = CenteredPolytope.box([-1] * 6, [1] * 6)
    with pytest.raises(OracleCapError):
        svp_brute(C, LatticeBasis.identity(6))


def test_enumeration_bound_covers_ball():
    B = LatticeBasis.from_columns([[3, 1], [1, 2]])
    bound = enumeration_bound(B, np.zeros(2), 1.0, 1.0)
    for lo, hi in bound.coefficient_box:
        assert lo <= 0 <= hi


def _random_case(seed):
    rng = make_rng(seed, (99,))
    C = standard_body(["cube", "skew", "random"][seed % 3], 2, rng)
    B = random_basis(2, rng)
    x = tuple(Fraction(int(v), 16) for v in rng.integers(-40, 40, size=2))
    return C, B, x


@pytest.mark.parametrize("seed", range(6))
def test_enumeration_completeness(seed):
    C, B, x = _random_case(seed)
    res = cvp_brute(C, B, x)
    centre = np.array(B.coords(x), float)
    bound = enumeration_bound(B, centre, float(res.value) + 0.5, C.origin_outradius)
    axes = [np.arange(lo - 1, hi + 2) for lo, hi in bound.coefficient_box]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    best = min(gauge_exact(C, [a - b for a, b in zip(B.point(c), x)]) for c in grid)
    assert best == res.value


@pytest.mark.parametrize("seed", range(6))
def test_unimodular_invariance(seed):
    C, B, x = _random_case(seed)
    rng = make_rng(seed, (7,))
    while True:
        U = rng.integers(-2, 3, size=(2, 2))
        if round(abs(np.linalg.det(U))) == 1:
            break
    BU = LatticeBasis(tuple(tuple(sum(B.B[i][k] * int(U[k][j]) for k in range(2)) for j in range(2)) for i in range(2)))
    assert cvp_brute(C, B, x).value == cvp_brute(C, BU, x).value
