from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from framecert.exact_arith import GaussRational, I, ONE, ZERO, as_gauss, format_rational, gr_arith, gr_conj, parse_rational

rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q.numerator) < 10**12)
gauss = st.builds(GaussRational, rationals, rationals)
nonzero = gauss.filter(bool)


def test_conjugate_product_is_norm():
    assert gr_arith(GaussRational(1, 2), GaussRational(1, -2), "mul") == GaussRational(5)


def test_conjugate_sum():
    a = GaussRational(Fraction(1, 2), Fraction(1, 3))
    assert gr_arith(a, gr_conj(a), "add") == ONE


def test_i_squared():
    assert gr_arith(I, I, "mul") == GaussRational(-1)


def test_conj_examples():
    assert gr_conj(GaussRational(3, 4)) == GaussRational(3, -4)
    assert gr_conj(7) == GaussRational(7)
    assert gr_conj(gr_conj(GaussRational(-2, 5))) == GaussRational(-2, 5)


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        gr_arith(ONE, ZERO, "div")


def test_unknown_op():
    with pytest.raises(ValueError):
        gr_arith(ONE, ONE, "pow")


def test_parsing_and_printing():
    assert parse_rational("-2/7") == Fraction(-2, 7)
    assert parse_rational("0.125") == Fraction(1, 8)
    assert format_rational(Fraction(6, -4)) == "-3/2"
    assert GaussRational.parse("-5-7i") == GaussRational(-5, -7)
    assert GaussRational.parse("1/2+3/4*i") == GaussRational(Fraction(1, 2), Fraction(3, 4))
    assert GaussRational.parse("9i") == GaussRational(0, 9)
    assert GaussRational.from_pair(["1/3", "-2"]) == GaussRational(Fraction(1, 3), -2)
    z = GaussRational(Fraction(-7, 3), Fraction(5, 2))
    assert GaussRational.parse(str(z)) == z
    assert GaussRational.from_pair(z.to_pair()) == z


def test_immutable():
    z = GaussRational(1, 2)
    with pytest.raises(AttributeError):
        z.re = Fraction(3)


def test_canonical_zero():
    z = GaussRational(Fraction(0, 5), Fraction(0, -3))
    assert z.re.denominator == 1 and z.im.denominator == 1
    assert z == ZERO and hash(z) == hash(ZERO)


@given(gauss, gauss, gauss)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a + ZERO == a and a * ONE == a
    assert a - a == ZERO


@given(nonzero, gauss)
def test_inverses(a, b):
    assert a * (ONE / a) == ONE
    assert (b / a) * a == b


@given(gauss)
def test_conjugation(a):
    assert gr_conj(gr_conj(a)) == a
    n = a * gr_conj(a)
    assert n.im == 0 and n.re == a.norm()


@given(gauss, gauss)
def test_canonical_representation(a, b):
    s = (a + b) - b
    assert s == a and (s.re, s.im) == (a.re, a.im)
    assert s.re.denominator > 0
    assert hash(s) == hash(a)


@given(gauss)
def test_as_gauss_idempotent(a):
    assert as_gauss(a) is a or as_gauss(a) == a
    assert as_gauss(str(a)) == a
