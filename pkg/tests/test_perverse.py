from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gkzlab.errors import NoCommonFace, ShapeMismatch
from gkzlab.perverse import (CLASSES, PerverseDatum, cross_poset, example_datum_rank1, exact_matrix, gauge,
                             identity_datum, line_datum, line_poset, mutated_cross_datum, phi,
                             product_datum, square_poset, validate)


def test_face_labels_of_the_fixtures():
    assert sorted(f.signs for f in line_poset().faces) == ["+", "-", "0"]
    assert cross_poset().counts_by_dim() == {0: 1, 1: 4, 2: 4}
    assert square_poset().counts_by_dim() == {0: 4, 1: 12, 2: 9}


@pytest.mark.parametrize("poset", [line_poset, cross_poset, square_poset])
def test_identity_datum_passes(poset):
    p = poset()
    rep = validate(p, identity_datum(p))
    assert rep.passed and not rep.unchecked


def test_rank1_phi_values():
    a, b = Fraction(2, 3), Fraction(-5, 7)
    p, d = line_poset(), example_datum_rank1(a, b)
    assert phi(p, d, "+", "-").tolist() == [[b]]
    assert phi(p, d, "-", "+").tolist() == [[a]]
    assert phi(p, d, "+", "+").tolist() == [[1]]


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_rank1_passes_iff_product_nonzero(a, b):
    rep = validate(line_poset(), example_datum_rank1(a, b))
    assert rep.passed == (a * b != 0)
    if not rep.passed:
        assert rep.classes() == {"isomorphism"}
        broken = {v.faces for v in rep.violations}
        want = set()
        if a == 0:
            want.add(("-", "+"))
        if b == 0:
            want.add(("+", "-"))
        assert broken == want


def test_rank1_float_entries_use_tolerance():
    assert validate(line_poset(), example_datum_rank1(1e-13, 1.0)).classes() == {"isomorphism"}
    assert validate(line_poset(), example_datum_rank1(1e-13, 1.0), tol=1e-14).passed


def test_two_point_line_and_no_common_face():
    p = line_poset((0, Fraction(1, 2)))
    d = line_datum(p, {"0-": (1, 2), "+0": (3, Fraction(1, 2))})
    assert validate(p, d).passed
    with pytest.raises(NoCommonFace):
        phi(p, d, "--", "++")


def test_product_of_valid_line_data_is_valid():
    lp = line_poset()
    dx = line_datum(lp, {"0": (2, 3)})
    dy = line_datum(lp, {"0": (Fraction(1, 2), -1)})
    assert validate(cross_poset(), product_datum(dx, dy, cross_poset())).passed


def test_gauge_preserves_outcome():
    rng = np.random.default_rng(0)
    p, d = line_poset(), example_datum_rank1(0, 2)
    d = PerverseDatum(d.dims, {k: v.astype(complex) for k, v in d.gamma.items()},
                      {k: v.astype(complex) for k, v in d.delta.items()})
    g = {s: np.eye(n) + 0.2 * rng.normal(size=(n, n)) for s, n in d.dims.items()}
    assert validate(p, gauge(d, g)).classes() == validate(p, d).classes() == {"isomorphism"}


def test_structural_failure_gates_phi_checks():
    p = line_poset()
    d = example_datum_rank1(0, 1)  # would fail isomorphism
    d.delta[("+", "0")] = exact_matrix([[2], [0]])  # and now gamma delta != id
    rep = validate(p, d)
    assert rep.classes() == {"inverse"} and rep.unchecked


def test_rescaled_pair_on_a_line_is_a_gauge_change():
    p = line_poset()
    d = identity_datum(p)
    d.gamma[("0", "+")] = exact_matrix([[2]])
    d.delta[("+", "0")] = exact_matrix([[Fraction(1, 2)]])
    assert validate(p, d).passed


def test_functoriality_violation_detected_exactly():
    p = cross_poset()
    d = identity_datum(p)
    d.gamma[("00", "++")] = exact_matrix([[2]])
    d.delta[("++", "00")] = exact_matrix([[Fraction(1, 2)]])
    rep = validate(p, d)
    assert rep.classes() == {"functoriality"}
    assert {v.axiom for v in rep.violations} == {"gamma-functor", "delta-functor"}
    assert all("++" in v.faces and "00" in v.faces for v in rep.violations)


def test_shape_mismatch():
    p = line_poset()
    d = identity_datum(p)
    d.gamma[("0", "+")] = exact_matrix([[1, 0]])
    with pytest.raises(ShapeMismatch):
        validate(p, d)
    with pytest.raises(ShapeMismatch):
        validate(cross_poset(), identity_datum(p))


def test_datum_json_round_trip():
    d = example_datum_rank1(Fraction(1, 2), 3)
    e = PerverseDatum.from_json(d.to_json())
    assert validate(line_poset(), e).passed
    assert phi(line_poset(), e, "-", "+").tolist() == [[Fraction(1, 2)]]


@pytest.mark.parametrize("kind", ["valid", *CLASSES])
def test_mutation_kinds_hit_exactly_their_class(kind):
    rng = np.random.default_rng(hash(kind) % 2 ** 32)
    for _ in range(8):
        p, d = mutated_cross_datum(kind, rng)
        rep = validate(p, d)
        assert rep.classes() == (set() if kind == "valid" else {kind})


def test_unknown_mutation():
    with pytest.raises(ValueError):
        mutated_cross_datum("bogus", np.random.default_rng(0))
