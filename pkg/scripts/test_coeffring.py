from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from phinabla.coeffring import Scalar, embed, make_field
from phinabla.exceptions import ContextMismatch, DivisionByZero, NonPrime

Q3 = make_field(3, 1, 8)
Q9 = make_field(3, 2, 8)
Q5 = make_field(5, 1, 4)


def test_rejects_non_prime():
    with pytest.raises(NonPrime):
        make_field(4)


def test_residue_polynomials():
    assert make_field(2, 2).residue_poly == (1, 1, 1)
    assert make_field(3, 2).residue_poly == (1, 0, 1)
    assert Q3.residue_poly is None
    assert Q9.q == 9


def test_valuation_of_integer():
    x = Q5.scalar(25)
    assert x.val == 2
    assert x.unit == (1,)
    assert x.is_exact


def test_inverse_carries_working_precision():
    inverse = Q5.scalar(2).inverse()
    assert inverse.val == 0
    assert inverse.unit == (313,)
    assert inverse.prec == 4


def test_uniformizer():
    assert Q3.pi == Q3.pi_power(1)
    assert Q3.pi.valuation() == 1


def test_inverse_of_signed_pi_power_is_exact():
    x = -Q3.pi_power(3)
    assert x.inverse() == -Q3.pi_power(-3)
    assert x.inverse().is_exact


def test_cancellation_is_an_inexact_zero():
    half = Q3.scalar(Fraction(1, 2))
    zero = half * 2 - 1
    assert zero.is_zero
    assert not zero.is_exact
    assert zero.prec == 8
    assert zero.vanishes()


def test_vanishes_at_working_precision():
    assert Q3.pi_power(8).vanishes()
    assert not Q3.pi_power(7).vanishes()
    assert Q3.pi_power(7).vanishes(7)


def test_unramified_generator():
    alpha = Scalar.from_coefficients(Q9, [0, 1])
    assert alpha * alpha == Q9.scalar(-1)
    assert (alpha * alpha.inverse()).equals_at(1)


def test_embedding_of_prime_field():
    assert embed(Q3.scalar(5), Q9) == Scalar.from_coefficients(Q9, [5, 0])
    assert embed(Q3.pi_power(2), Q9).val == 2


def test_mixing_fields_is_rejected():
    with pytest.raises(ContextMismatch):
        Q3.scalar(1) + Q5.scalar(1)


def test_zero_has_no_inverse():
    with pytest.raises(DivisionByZero):
        Q3.zero().inverse()

    with pytest.raises(ZeroDivisionError):
        Q3.scalar(1) / 0


class TestScalarArithmetic:
    nonzero = st.integers(-10 ** 6, 10 ** 6).filter(bool)

    @given(nonzero, nonzero)
    def test_valuation_is_additive(self, a, b):
        assert (Q3.scalar(a) * Q3.scalar(b)).valuation() == Q3.scalar(a).valuation() + Q3.scalar(b).valuation()

    @given(nonzero, nonzero)
    def test_ultrametric_inequality(self, a, b):
        x, y = Q3.scalar(a), Q3.scalar(b)
        assert (x + y).valuation() >= min(x.valuation(), y.valuation())

    @given(nonzero, nonzero)
    def test_integer_arithmetic_is_exact(self, a, b):
        assert (Q3.scalar(a) * Q3.scalar(b) - Q3.scalar(a * b)) == Q3.zero()
        assert (Q3.scalar(a) + Q3.scalar(b)).to_fraction() == a + b

    @given(nonzero)
    def test_inverse(self, a):
        x = Q3.scalar(a)
        assert (x * x.inverse()).equals_at(1)

    @given(st.lists(st.integers(-50, 50), min_size=2, max_size=2))
    def test_unramified_inverse(self, coeffs):
        x = Scalar.from_coefficients(Q9, coeffs)
        assume(not x.is_zero)
        assert (x * x.inverse()).equals_at(1)
