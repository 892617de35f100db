from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gkzlab.exact import fmt, linprog_max, nullspace, primitive, rank, solve, strict_point, to_fraction


def test_to_fraction_forms():
    assert to_fraction("3/10") == Fraction(3, 10)
    assert to_fraction(0.25) == Fraction(1, 4)
    assert to_fraction(0.1) == Fraction(1, 10)
    assert to_fraction(7) == 7
    with pytest.raises(TypeError):
        to_fraction(True)


def test_fmt_round_trip():
    assert fmt(Fraction(-3, 4)) == "-3/4"
    assert fmt(5) == "5"
    assert to_fraction(fmt(Fraction(22, 7))) == Fraction(22, 7)


def test_primitive_sign_and_gcd():
    assert primitive([Fraction(-2, 3), Fraction(4, 3)]) == (1, -2)
    assert primitive([0, 6, 9]) == (0, 2, 3)
    with pytest.raises(ValueError):
        primitive([0, 0])


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=4))
def test_nullspace_is_annihilated(rows):
    ns = nullspace(rows)
    assert len(ns) == 4 - rank(rows)
    for v in ns:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


def test_solve_inconsistent_returns_none():
    assert solve([[1, 1], [2, 2]], [1, 3]) is None
    assert solve([[1, 1], [1, -1]], [2, 0]) == [1, 1]


def test_linprog_small_known_optimum():
    # max x + y  s.t. x + 2y <= 4, 3x + y <= 6  -> (8/5, 6/5), value 14/5
    res = linprog_max([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == "optimal"
    assert res.value == Fraction(14, 5)
    assert res.x == (Fraction(8, 5), Fraction(6, 5))


def test_linprog_infeasible_and_unbounded():
    assert linprog_max([1], [[1]], [-1]).status == "infeasible"
    assert linprog_max([1], [[-1]], [0]).status == "unbounded"


def test_strict_point_open_interval():
    x, margin = strict_point(1, strict=[([1], 1), ([-1], 0)])
    assert 0 < x[0] < 1 and margin > 0
    assert strict_point(1, strict=[([1], 0), ([-1], 0)]) is None


@settings(max_examples=30)
@given(st.integers(-6, 6), st.integers(1, 6))
def test_strict_point_matches_interval_oracle(a, w):
    # open interval (a, a + w) intersected with x != a + w / 2 style equality
    mid = Fraction(2 * a + w, 2)
    got = strict_point(1, strict=[([1], a + w), ([-1], -a)], equal=[([1], mid)])
    assert got is not None and got[0] == (mid,)
    assert strict_point(1, strict=[([1], a + w), ([-1], -a)], equal=[([1], a + w)]) is None
