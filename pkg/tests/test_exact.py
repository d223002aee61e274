from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from millsratio.exact import (
    IntPoly,
    as_rational,
    format_poly,
    poly_add,
    poly_arith,
    poly_derivative,
    poly_eval,
    poly_mul,
    poly_shift_mul_t,
    poly_sub,
)

P4 = IntPoly([3, 0, 6, 0, 1])
Q3 = IntPoly([0, 5, 0, 1])

coeff_lists = st.lists(st.integers(-10**6, 10**6), max_size=8)
rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 100)


def test_eval_examples():
    assert poly_eval(P4, 1) == 10
    assert poly_eval(IntPoly(), Fraction(7, 3)) == 0
    assert poly_eval(Q3, Fraction(1, 2)) == Fraction(21, 8)


def test_eval_is_exact_for_huge_arguments():
    p = IntPoly([1] * 30)
    x = Fraction(10**40 + 1, 3**50)
    assert poly_eval(p, x) == sum(x**i for i in range(30))


def test_derivative_examples():
    assert poly_derivative(IntPoly([1, 0, 1])) == IntPoly([0, 2])
    assert poly_derivative(IntPoly([1])).is_zero()
    assert poly_derivative(P4) == IntPoly([0, 12, 0, 4])


def test_arith_examples():
    t = IntPoly([0, 1])
    assert poly_arith(t, IntPoly([1]), "add") == IntPoly([1, 1])
    assert poly_arith(t, IntPoly([1, 0, 1]), "mul") == IntPoly([0, 1, 0, 1])
    p2 = IntPoly([1, 0, 1])
    assert poly_arith(p2, p2, "sub").is_zero()
    assert poly_shift_mul_t(p2) == IntPoly([0, 1, 0, 1])
    with pytest.raises(ValueError):
        poly_arith(t, t, "div")


def test_zero_and_access():
    z = IntPoly([0, 0, 0])
    assert z.is_zero() and z.degree == -1 and z == IntPoly()
    assert P4[10] == 0 and P4[4] == 1


def test_format():
    assert format_poly(P4) == "t^4 + 6t^2 + 3"
    assert format_poly(IntPoly([0, 1])) == "t"
    assert format_poly(IntPoly([1])) == "1"
    assert format_poly(IntPoly([-1, 0, -2])) == "-2t^2 - 1"
    assert format_poly(IntPoly()) == "0"


def test_as_rational_rejects_floats():
    assert as_rational("7/2") == Fraction(7, 2)
    assert as_rational("0.05") == Fraction(1, 20)
    with pytest.raises(TypeError):
        as_rational(0.1)


@given(coeff_lists, st.integers(0, 5))
def test_canonical_form_ignores_trailing_zeros(cs, pad):
    a = IntPoly(cs)
    b = IntPoly(cs + [0] * pad)
    assert a == b and hash(a) == hash(b)
    assert a.is_zero() or a.coeffs[-1] != 0


@given(coeff_lists, coeff_lists, rationals)
def test_eval_is_a_ring_homomorphism(a, b, x):
    pa, pb = IntPoly(a), IntPoly(b)
    assert poly_eval(poly_add(pa, pb), x) == poly_eval(pa, x) + poly_eval(pb, x)
    assert poly_eval(poly_sub(pa, pb), x) == poly_eval(pa, x) - poly_eval(pb, x)
    assert poly_eval(poly_mul(pa, pb), x) == poly_eval(pa, x) * poly_eval(pb, x)


@given(coeff_lists, coeff_lists)
def test_product_rule(a, b):
    pa, pb = IntPoly(a), IntPoly(b)
    lhs = poly_derivative(poly_mul(pa, pb))
    rhs = poly_add(poly_mul(poly_derivative(pa), pb), poly_mul(pa, poly_derivative(pb)))
    assert lhs == rhs


@given(coeff_lists)
def test_derivative_drops_degree_by_one(cs):
    p = IntPoly(cs)
    if p.degree >= 1:
        assert poly_derivative(p).degree == p.degree - 1
