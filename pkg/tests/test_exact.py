from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from okounkov.errors import DimensionError, ParseError
from okounkov.exact import (GRLEX, LEX, GroupOrder, Polynomial, compare, exp_add,
                            format_polynomial, parse_polynomial, rational_str)
from strategies import exponents, nonzero_polynomials, orders, polynomials


def P(text, n=1):
    return parse_polynomial(text, n)


def test_rational_str_always_has_denominator():
    assert rational_str(Fraction(3)) == "3/1"
    assert rational_str(Fraction(-3, 6)) == "-1/2"
    assert rational_str(0) == "0/1"


@pytest.mark.parametrize("text, n, terms", [
    ("1 + u1^2", 1, {(0,): 1, (2,): 1}),
    ("u1^-1 + 3/2*u1^2", 1, {(-1,): 1, (2,): Fraction(3, 2)}),
    ("-u1*u2^-1 + u2", 2, {(1, -1): -1, (0, 1): 1}),
    ("2*u1 - 2*u1", 1, {}),
    ("--u1", 1, {(1,): 1}),
    ("0", 2, {}),
])
def test_parse_known_strings(text, n, terms):
    assert P(text, n) == Polynomial(n, terms)


@pytest.mark.parametrize("text, column", [
    ("u3", 3), ("u1^", 4), ("u1 +", 5), ("*u1", 1), ("x", 1), ("3/0", 4),
])
def test_parse_errors_carry_column(text, column):
    with pytest.raises(ParseError) as exc:
        parse_polynomial(text, 2)
    assert exc.value.column == column


def test_parse_error_line_is_passed_through():
    with pytest.raises(ParseError) as exc:
        parse_polynomial("u1^^2", 1, line=7, column=10)
    assert exc.value.line == 7 and exc.value.column > 10


def test_format_is_ascending_in_lex():
    assert format_polynomial(P("u1^3 + 1 + u1^2")) == "1 + u1^2 + u1^3"
    assert format_polynomial(P("2 - u1")) == "2 - u1"
    assert format_polynomial(P("0")) == "0"


@given(polynomials(2))
def test_format_parse_round_trip(f):
    assert parse_polynomial(format_polynomial(f), 2) == f


@given(polynomials(2), polynomials(2), polynomials(2))
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == Polynomial.zero(2)
    assert f * Polynomial.constant(2, 1) == f


@given(nonzero_polynomials(2), nonzero_polynomials(2))
def test_no_zero_divisors(f, g):
    assert not (f * g).is_zero()


@given(polynomials(2), st.tuples(st.integers(1, 4), st.integers(1, 4)))
def test_evaluate_matches_array_evaluation(f, point):
    exact = float(f.evaluate(point))
    approx = f.evaluate_array(np.array([point], dtype=float))[0]
    assert approx == pytest.approx(exact, rel=1e-12, abs=1e-12)


@given(polynomials(1), polynomials(1))
def test_derivative_is_a_derivation(f, g):
    assert (f * g).derivative(0) == f.derivative(0) * g + f * g.derivative(0)


def test_powers():
    assert P("u1 + 1") ** 3 == P("1 + 3*u1 + 3*u1^2 + u1^3")
    assert P("u1") ** -2 == P("u1^-2")
    with pytest.raises(ValueError):
        P("u1 + 1") ** -1


@given(orders(3), exponents(3), exponents(3), exponents(3))
def test_orders_are_total_and_translation_invariant(order, a, b, c):
    ab = compare(order, a, b)
    assert ab == -compare(order, b, a)
    assert (ab == 0) == (a == b)
    assert compare(order, exp_add(a, c), exp_add(b, c)) == ab


@given(orders(2), exponents(2), exponents(2), exponents(2))
def test_orders_are_transitive(order, a, b, c):
    if compare(order, a, b) <= 0 and compare(order, b, c) <= 0:
        assert compare(order, a, c) <= 0


def test_order_examples():
    assert compare(LEX, (1, 0), (0, 5)) == 1
    assert compare(GRLEX, (1, 0), (0, 5)) == -1
    assert compare(GroupOrder("weighted", (0, 1)), (5, 0), (0, 1)) == -1
    with pytest.raises(DimensionError):
        compare(LEX, (1,), (1, 2))


@pytest.mark.parametrize("spec", ["lex", "grlex", "weighted 1,2"])
def test_order_spec_round_trip(spec):
    assert GroupOrder.from_spec(spec).spec() == spec


def test_order_spec_rejects_unknown():
    with pytest.raises(ParseError):
        GroupOrder.from_spec("revlex")


def test_mixed_variable_counts_rejected():
    with pytest.raises(DimensionError):
        Polynomial.variable(1, 0) + Polynomial.variable(2, 0)
