from fractions import Fraction

import pytest
from hypothesis import given, settings

from phinabla.coeffring import make_field
from phinabla.exceptions import NotInvertibleAtPrecision, WildRamification
from phinabla.robba import make_extension, make_ring, mu_factor, pullback

from .strategies import elements, nonzero_elements, units

Q2 = make_field(2, 1, 8)
Q3 = make_field(3, 1, 8)
R2 = make_ring(Q2, (-32, 32))
R3 = make_ring(Q3, (-32, 32))


def test_laurent_product():
    t = R3.t
    t_inv = R3.monomial(-1)
    assert (t + t_inv) * (t - t_inv) == R3.element({2: 1, -2: -1})


def test_derivative():
    assert R3.monomial(-1, 3).derive() == R3.monomial(-2, -3)
    assert R3.constant(7).derive().is_zero


def test_frobenius_on_variable():
    assert (R2.t + R2.monomial(-1)).frobenius() == R2.element({2: 1, -2: 1})
    assert R3.t.frobenius(2) == R3.monomial(9)


def test_mu_factor():
    assert mu_factor(R2, 1) == R2.monomial(1, 2)
    assert mu_factor(R2, 2) == R2.monomial(3, 4)
    assert mu_factor(R3, 1) == R3.monomial(2, 3)
    assert mu_factor(R3, 2) == R3.monomial(8, 9)


def test_gauss_valuation():
    x = R3.element({-1: 3, 1: 1})
    assert x.gauss_valuation(Fraction(1, 2)) == Fraction(1, 2)
    assert x.gauss_valuation() == 0


def test_inverse_of_unit_series():
    field = make_field(5, 1, 3)
    ring = make_ring(field, (-32, 32))
    x = ring.element({0: 1, -1: 5})
    y = x.invert()
    assert y.terms == ring.element({0: 1, -1: -5, -2: 25}).terms
    assert y.prec == 3


def test_inverse_of_one_plus_pi_t():
    x = R3.element({0: 1, 1: 3})
    y = x.invert()
    assert y.terms == R3.element({k: (-3) ** k for k in range(8)}).terms
    assert y.prec == 8
    assert (x * y).terms == R3.element({0: 1, 8: -3 ** 8}).terms
    assert (x * y).equals_at(R3.one())


def test_truncated_inverse_loses_digits_under_division():
    x = R3.element({0: 3, 1: 9})
    y = x.invert()
    assert y.prec == 7
    assert (x * y).equals_at(R3.one(), 7)
    assert R3.monomial(0, 3).invert().prec is None

    shifted = (x * y - R3.one()).scale(Q3.pi_power(-2))
    assert shifted.vanishes(shifted.prec)


def test_zero_is_not_invertible():
    with pytest.raises(NotInvertibleAtPrecision):
        R3.zero().invert()


def test_window_loss_is_recorded():
    ring = make_ring(Q3, (-4, 4))
    product = ring.monomial(3) * ring.monomial(3)
    assert product.is_zero
    assert product.window_loss


def test_non_default_lift():
    ring = make_ring(Q3, (-32, 32), {3: 1, 4: 3})
    assert not ring.default_lift
    assert ring.t.frobenius() == ring.element({3: 1, 4: 3})
    assert mu_factor(ring, 1) == ring.element({2: 3, 3: 12})


def test_lift_must_reduce_to_power():
    with pytest.raises(ValueError):
        make_ring(Q3, (-32, 32), {3: 1, 4: 1})


def test_kummer_pullback():
    ext = make_extension(R3, 2)
    inner = ext.inner
    assert pullback(R3.element({3: 1, -1: 1}), ext) == inner.element({6: 1, -2: 1})
    assert inner.t.derive() == inner.one()
    assert pullback(R3.t.frobenius(), ext) == pullback(R3.t, ext).frobenius()


def test_kummer_derivative_matches_base():
    ext = make_extension(R3, 2)
    x = R3.element({3: 1, -2: 5})
    assert pullback(x.derive(), ext) == pullback(x, ext).derive()


def test_wild_extension_is_rejected():
    with pytest.raises(WildRamification):
        make_extension(R3, 3)


class TestDerivationAndFrobenius:
    @given(elements(R3), elements(R3))
    def test_leibniz(self, x, y):
        assert (x * y).derive() == x.derive() * y + x * y.derive()

    @given(elements(R3), elements(R3))
    def test_frobenius_is_multiplicative(self, x, y):
        assert (x * y).frobenius() == x.frobenius() * y.frobenius()

    @given(elements(R3), elements(R3))
    def test_frobenius_is_additive(self, x, y):
        assert (x + y).frobenius() == x.frobenius() + y.frobenius()

    @given(elements(R3))
    def test_chain_rule(self, x):
        assert x.frobenius().derive() == mu_factor(R3, 1) * x.derive().frobenius()

    @given(elements(R3, exponents=(-3, 3)))
    def test_iterated_frobenius(self, x):
        assert x.frobenius(2) == x.frobenius().frobenius()


class TestGaussValuation:
    @given(nonzero_elements(R3), nonzero_elements(R3))
    def test_multiplicative(self, x, y):
        assert (x * y).gauss_valuation() == x.gauss_valuation() + y.gauss_valuation()
        assert (x * y).gauss_valuation(Fraction(1, 3)) == (
            x.gauss_valuation(Fraction(1, 3)) + y.gauss_valuation(Fraction(1, 3)))


class TestInverse:
    @settings(max_examples=50, deadline=None)
    @given(units(R3))
    def test_inverse_of_unit(self, x):
        y = x.invert()
        assert not y.window_loss
        assert (x * y).equals_at(R3.one())
