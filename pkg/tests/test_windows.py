from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gkzlab.arrangement import Zonotope
from gkzlab.errors import DegenerateZonotope, NonGenericNu, ZeroCoordinate
from gkzlab.lattice import ToricInput, kernel_basis
from gkzlab.windows import (LaurentMatrix, check_nu_generic, enumerate_window, laurent_add, laurent_mul,
                            lift_characters, lift_difference_coefficients, specialize)

CONIFOLD = ToricInput.from_rows([[-1, -1, 1, 1]])
DELTA = Zonotope.from_input(CONIFOLD)


def test_conifold_window_is_zero_one():
    w = enumerate_window([Fraction(3, 10)], DELTA)
    assert w.characters == ((0,), (1,))


@given(st.fractions(-5, 5, max_denominator=12))
def test_window_size_and_genericity(nu):
    generic = nu.denominator != 1
    assert check_nu_generic([nu], DELTA) == generic
    if not generic:
        with pytest.raises(NonGenericNu):
            enumerate_window([nu], DELTA)
        return
    w = enumerate_window([nu], DELTA)
    # oracle: integers in the closed interval [nu - 1, nu + 1]
    assert [c[0] for c in w.characters] == [k for k in range(-8, 9) if nu - 1 <= k <= nu + 1]


def test_degenerate_zonotope():
    with pytest.raises(DegenerateZonotope):
        check_nu_generic([Fraction(1, 3)] * 2, Zonotope.from_input(ToricInput.from_rows([[1, -1], [1, -1]])))


def test_window_square_unit_cell():
    z = Zonotope.from_input(ToricInput.from_rows([[1, -1, 0, 0], [0, 0, 1, -1]]))
    assert enumerate_window([Fraction(1, 3), Fraction(-1, 5)], z).characters == ((0, 0),)
    z2 = Zonotope.from_input(ToricInput.from_rows([[2, -2, 0, 0], [0, 0, 1, -1]]))
    assert enumerate_window([Fraction(1, 3), Fraction(-1, 5)], z2).characters == ((0, 0), (1, 0))


def test_lifts_are_preimages():
    w = enumerate_window([Fraction(3, 10)], DELTA)
    lifts = lift_characters(w, CONIFOLD)
    for c in lifts:
        assert CONIFOLD.B.apply(c.mu_hat) == c.mu
    kb = kernel_basis(CONIFOLD)
    diff = [a - b for a, b in zip(lifts[1].mu_hat, lifts[0].mu_hat)]
    assert lift_difference_coefficients(kb, diff) is None  # differ by a non-kernel vector
    assert lift_difference_coefficients(kb, [1, 0, 1, 0]) == [1, -1, 0] or \
        np.allclose(np.array(kb.A.to_rows()).T @ np.array(
            [float(x) for x in lift_difference_coefficients(kb, [1, 0, 1, 0])]), [1, 0, 1, 0])


def test_laurent_arithmetic():
    p = {(1,): 1, (0,): 1}
    q = {(-1,): 1, (0,): -1}
    assert laurent_mul(p, q) == {(1,): -1, (-1,): 1}
    assert laurent_add(p, {(1,): -1}) == {(0,): 1}


def test_specialize_exact_and_float():
    M = LaurentMatrix.from_rows([[{(1, 0): 1, (0, 0): 1}, {(0, -1): 2}], [{}, {(0, 0): 1}]], 2)
    ex = specialize(M, [Fraction(1, 2), 2])
    assert ex[0, 0] == Fraction(3, 2) and ex[0, 1] == 1 and ex[1, 0] == 0
    fl = specialize(M, [0.5j, 2.0])
    assert fl[0, 0] == pytest.approx(1 + 0.5j)
    with pytest.raises(ZeroCoordinate):
        specialize(M, [0, 1])


def test_specialize_is_a_ring_map():
    rng = np.random.default_rng(3)
    A = LaurentMatrix.from_rows([[{(1,): 2, (-1,): 1}, {(0,): 1}], [{(2,): -1}, {(-2,): 3}]], 1)
    B = LaurentMatrix.from_rows([[{(0,): 1}, {(1,): 1}], [{(-1,): 1}, {(0,): -1}]], 1)
    for _ in range(5):
        h = [complex(*rng.normal(size=2))]
        assert np.allclose(specialize(A @ B, h), specialize(A, h) @ specialize(B, h))
    assert LaurentMatrix.from_json(A.to_json()) == A
