from fractions import Fraction

import pytest

from gaugesieve import linalg
from gaugesieve.linalg import qmat, qvec


def test_to_fraction_accepts_strings_ints_and_floats():
    assert linalg.to_fraction("3/4") == Fraction(3, 4)
    assert linalg.to_fraction(2) == 2
    assert linalg.to_fraction(0.5) == Fraction(1, 2)
    assert linalg.to_fraction("-1.25") == Fraction(-5, 4)


def test_fmt_rational_round_trips():
    for q in [Fraction(0), Fraction(7), Fraction(-3, 8)]:
        assert linalg.to_fraction(linalg.fmt_rational(q)) == q
    assert linalg.fmt_rational(Fraction(6, 3)) == "2"


def test_inverse_is_exact():
    M = qmat([[2, 1], [0, 1]])
    Minv = linalg.inverse(M)
    assert linalg.matmul(M, Minv) == qmat([[1, 0], [0, 1]])
    assert Minv == qmat([["1/2", "-1/2"], [0, 1]])


def test_singular_inverse_raises():
    with pytest.raises(ValueError):
        linalg.inverse(qmat([[1, 2], [2, 4]]))


def test_det_and_rank():
    assert linalg.det(qmat([[2, 1], [0, 1]])) == 2
    assert linalg.det(qmat([[1, 2], [2, 4]])) == 0
    assert linalg.rank(qmat([[1, 2, 3], [2, 4, 6]])) == 1


def test_nullspace_is_orthogonal():
    M = qmat([[1, 1, 0]])
    N = linalg.nullspace(M, 3)
    assert len(N) == 2
    for v in N:
        assert linalg.dot(M[0], v) == 0


def test_integer_rows_scale_by_lcm():
    assert linalg.integer_rows([qvec(["1/2", "1/3"])]) == [[3, 2]]
