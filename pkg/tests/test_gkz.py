import itertools
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from gkzlab.errors import DegenerateCone, DimensionMismatch, GammaNormalizationUndefined
from gkzlab.gkz import (DifferentialOperator, apply_operator, box_operator, build_gkz, check_nonresonant,
                        cone_facet_normals, gamma_factor, homogeneity_operator, series_solution)
from gkzlab.lattice import IntegerMatrix, KernelBasis, ToricInput, kernel_basis
from oracles import gauss_series_coefficient

CONIFOLD = ToricInput.from_rows([[-1, -1, 1, 1]])
KB = kernel_basis(CONIFOLD)
F = Fraction


DISPLAYED = KernelBasis(IntegerMatrix.from_rows([[-1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]]))


def gauss_gamma(a, b, c):
    """alpha = (c - 1, -a, -b) in the displayed basis and an exponent with A gamma = alpha."""
    gamma = (F(0), c - 1, -a, -b)
    alpha = tuple(sum(x * g for x, g in zip(row, gamma)) for row in DISPLAYED.rows())
    assert alpha == (c - 1, -a, -b)
    return alpha, gamma


def test_operator_merges_and_drops_zero():
    op = DifferentialOperator((((0,), (1,), 2), ((0,), (1,), -2), ((1,), (0,), 3)))
    assert op.terms == (((1,), (0,), 3),)
    with pytest.raises(ValueError):
        DifferentialOperator((((0,), (-1,), 1),))
    assert DifferentialOperator.from_json(op.to_json()).terms == (((1,), (0,), 3 + 0j),)


def test_box_vectors_conifold():
    sys = build_gkz(CONIFOLD, KB, (F(0),) * 3)
    assert sys.box_vectors == ((-1, -1, 1, 1), (-2, -2, 2, 2))
    assert box_operator((-1, -1, 1, 1)).terms == (((0,) * 4, (0, 0, 1, 1), 1), ((0,) * 4, (1, 1, 0, 0), -1))


def test_build_gkz_dimension_checks():
    with pytest.raises(DimensionMismatch):
        build_gkz(CONIFOLD, KB, (0, 0))
    bad = KernelBasis(IntegerMatrix.from_rows([[1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, -1]]))
    with pytest.raises(DimensionMismatch):
        build_gkz(CONIFOLD, bad, (0, 0, 0))


def test_facet_normals_conifold():
    assert cone_facet_normals(DISPLAYED) == [(0, 0, 1), (0, 1, 0), (1, 0, 1), (1, 1, 0)]
    normals = cone_facet_normals(KB)
    assert len(normals) == 4
    for u in normals:
        assert all(sum(a * b for a, b in zip(u, KB.A.col(j))) >= 0 for j in range(4))
    with pytest.raises(DegenerateCone):
        cone_facet_normals(KernelBasis(IntegerMatrix(0, 2, ())))


def resonant_oracle(A_rows, alpha, reach=3):
    """alpha sits on an integer translate of a facet hyperplane of the column cone."""
    A = sympy.Matrix(A_rows)
    r = A.rows
    cols = [A.col(j) for j in range(A.cols)]
    facets = []
    for sub in itertools.combinations(cols, r - 1):
        M = sympy.Matrix.hstack(*sub)
        if M.rank() != r - 1:
            continue
        u = M.T.nullspace()[0]
        vals = [(u.T * c)[0] for c in cols]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            facets.append(M)
    al = sympy.Matrix([sympy.Rational(v.numerator, v.denominator) for v in alpha])
    for M in facets:
        for k in itertools.product(range(-reach, reach + 1), repeat=r):
            if sympy.Matrix.hstack(M, al - sympy.Matrix(k)).rank() == r - 1:
                return True
    return False


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(-2, 2, max_denominator=4), min_size=3, max_size=3))
def test_nonresonance_matches_translate_oracle(alpha):
    for basis in (KB, DISPLAYED):
        assert check_nonresonant(basis, alpha) == (not resonant_oracle(basis.A.to_rows(), alpha))


def test_nonresonance_small_examples():
    one = KernelBasis(IntegerMatrix.from_rows([[1, 2]]))
    assert check_nonresonant(one, [F(1, 2)]) and not check_nonresonant(one, [3])
    assert check_nonresonant(KB, [F(-1, 2), F(-1, 3), F(-1, 5)])
    assert not check_nonresonant(KB, [0, 0, 0])
    assert check_nonresonant(KB, [0.5 + 0.1j, -1 / 3, -0.2])


@settings(max_examples=40)
@given(st.fractions(-5, 5, max_denominator=7).filter(lambda g: g.denominator != 1), st.integers(-6, 6))
def test_gamma_factor_matches_mpmath(g, k):
    want = mpmath.gamma(mpmath.mpf(g.numerator) / g.denominator + 1) * \
        mpmath.rgamma(mpmath.mpf(g.numerator) / g.denominator + k + 1)
    assert abs(float(gamma_factor(g, k)) - float(want)) <= 1e-12 * max(1, abs(float(want)))


def test_gamma_factor_integer_poles():
    assert gamma_factor(2, 1) == F(1, 6)
    assert gamma_factor(-1, 0) == 0 and gamma_factor(-3, 1) == 0
    assert gamma_factor(-3, 3) == 1


@pytest.mark.parametrize("N", [3, 5, 7])
def test_homogeneity_residual_exactly_zero(N):
    alpha, gamma = gauss_gamma(F(1, 3), F(1, 5), F(1, 2))
    sys = build_gkz(CONIFOLD, DISPLAYED, alpha)
    s = series_solution(sys, gamma, N)
    for op in sys.homogeneity_ops:
        res = apply_operator(op, s)
        assert res.interior_max == 0 and res.boundary_max == 0


def test_box_residual_interior_zero_and_boundary_decays():
    alpha, gamma = gauss_gamma(F(1, 3), F(1, 5), F(1, 2))
    sys = build_gkz(CONIFOLD, DISPLAYED, alpha)
    x = (0.5, 1.0, 1.0, 1.0)
    tails = []
    for N in (3, 5, 7):
        s = series_solution(sys, gamma, N)
        for op in sys.box_ops:
            res = apply_operator(op, s)
            assert res.interior_max == 0
            assert all(min(m) >= -N for m in res.boundary_sources)
        tails.append(apply_operator(sys.box_ops[0], s).weighted_boundary_max(x))
    assert tails[0] > tails[1] > tails[2] > 0


def test_series_matches_pochhammer_oracle():
    a, b, c = F(1, 3), F(1, 5), F(1, 2)
    alpha, gamma = gauss_gamma(a, b, c)
    s = series_solution(build_gkz(CONIFOLD, DISPLAYED, alpha), gamma, 8)
    for k in range(9):
        want = gauss_series_coefficient(a, b, c, k)
        assert abs(float(s.coefficients[(-k,)]) - float(want)) <= 1e-12
    assert all(s.coefficients[(k,)] == 0 for k in range(1, 9))


def test_series_float_exponent_agrees_with_exact():
    alpha, gamma = gauss_gamma(F(1, 3), F(1, 5), F(1, 2))
    sys_f = build_gkz(CONIFOLD, DISPLAYED, tuple(complex(v) for v in alpha))
    sf = series_solution(sys_f, tuple(complex(g) for g in gamma), 5)
    se = series_solution(build_gkz(CONIFOLD, DISPLAYED, alpha), gamma, 5)
    for m, v in se.coefficients.items():
        assert abs(sf.coefficients[m] - complex(v)) <= 1e-13


def test_series_preconditions():
    sys = build_gkz(CONIFOLD, KB, (F(0),) * 3)
    with pytest.raises(ValueError):
        series_solution(sys, (1, 0, 0, 0), 3)
    s = series_solution(sys, (0, 0, 0, 0), 4)
    assert {m: v for m, v in s.coefficients.items() if v} == {(0,): 1}
    sys2 = build_gkz(CONIFOLD, KB, (-1, -1, 0))
    with pytest.raises(GammaNormalizationUndefined) as exc:
        series_solution(sys2, (-1, -1, 0, 0), 0)
    assert exc.value.index == 0


def test_displayed_homogeneity_with_symbolic_parameters():
    a1, a2, a3 = sympy.symbols("alpha1:4")
    op = homogeneity_operator([-1, 1, 0, 0], a1)
    assert op.terms == (((0, 0, 0, 0), (0, 0, 0, 0), -a1),
                        ((0, 1, 0, 0), (0, 1, 0, 0), 1),
                        ((1, 0, 0, 0), (1, 0, 0, 0), -1))
