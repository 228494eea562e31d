from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from vonstaudt.surd import Surd, as_exact, exact_sign, sqrt

RADICANDS = [2, 3, 5, 6, 7, 10]

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)


@st.composite
def surds(draw):
    value = Surd(draw(rationals))
    for r in draw(st.lists(st.sampled_from(RADICANDS), max_size=3)):
        value = value + draw(rationals) * sqrt(r)
    return value


def to_sympy(s: Surd):
    total = sympy.Integer(0)
    for key, c in s.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for g in key:
            term *= sympy.sqrt(g)
        total += term
    return total


def test_sqrt_extracts_squares():
    assert sqrt(8) == 2 * sqrt(2)
    assert sqrt(Fraction(9, 4)).is_rational()
    assert sqrt(Fraction(1, 2)) == sqrt(2) / 2


def test_product_of_roots_is_root_of_product():
    assert sqrt(2) * sqrt(3) - sqrt(6) == 0


def test_negative_sqrt_rejected():
    with pytest.raises(ValueError):
        sqrt(-1)


def test_inverse_by_conjugates():
    assert 1 / (sqrt(2) + sqrt(3)) == sqrt(3) - sqrt(2)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Surd(1) / (sqrt(2) - sqrt(2))


def test_str_parse_round_trip():
    s = Fraction(3, 2) - sqrt(2) + 2 * sqrt(2) * sqrt(3)
    assert Surd.parse(str(s)) == s
    assert " " not in str(s)


def test_as_exact_collapses_rationals():
    assert isinstance(as_exact(sqrt(4)), Fraction)
    assert isinstance(as_exact(sqrt(2)), Surd)


@settings(max_examples=150, deadline=None)
@given(surds(), surds())
def test_arithmetic_matches_sympy(a, b):
    assert sympy.simplify(to_sympy(a + b) - (to_sympy(a) + to_sympy(b))) == 0
    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@settings(max_examples=150, deadline=None)
@given(surds())
def test_sign_matches_sympy(a):
    v = sympy.N(to_sympy(a), 60)
    expected = 0 if abs(v) < sympy.Float("1e-40") else (1 if v > 0 else -1)
    assert exact_sign(a) == expected


@settings(max_examples=100, deadline=None)
@given(surds())
def test_inverse_is_inverse(a):
    if a == 0:
        return
    assert a * a.inverse() == 1


def test_sign_of_near_cancellation():
    # 1393/985 is a close convergent of sqrt(2)
    a = Surd(Fraction(1393, 985)) - sqrt(2)
    below = 1393**2 < 2 * 985**2
    assert exact_sign(a) == (-1 if below else 1)
    assert exact_sign(-a) == (1 if below else -1)
    b = Surd(Fraction(665857, 470832)) - sqrt(2)
    assert exact_sign(b) == (-1 if 665857**2 < 2 * 470832**2 else 1)
