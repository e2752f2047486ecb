"""
Coefficient field K: Q_p or its unramified extension of degree f, at finite p-adic precision N.

Elements are stored as p^val * unit where the unit is a polynomial of degree < f in the generator of the
residue extension. Integers stay exact; inverses of units carry N relative digits. Every scalar knows its
absolute precision (None for exact values), so cancellation is reported as an inexact zero O(p^k) instead of
pretending to be an exact zero. Frobenius acts trivially on K.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcdex, gf_irreducible_p

from .exceptions import ContextMismatch, DivisionByZero, NoIrreduciblePolynomialFound, NonPrime
from .logger import Log

INFINITY = math.inf

# Brute-force root search in a residue field is limited to this many elements.
MAX_EMBEDDING_SEARCH = 200000


@dataclass(frozen=True)
class FieldContext:
    p: int
    f: int
    N: int
    residue_poly: Optional[Tuple[int, ...]] = None  # monic, little-endian, degree f (absent when f == 1)

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def pi(self) -> 'Scalar':
        return Scalar.from_int(self, self.p)

    @property
    def modulus_poly(self) -> Tuple[int, ...]:
        """ Monic polynomial defining the unramified extension; x for the prime field. """

        if self.residue_poly is None:
            return (0, 1)

        return self.residue_poly

    def scalar(self, value: 'ScalarLike') -> 'Scalar':
        """ Coerces an int, a Fraction or a Scalar of this field. """

        if isinstance(value, Scalar):
            if value.field != self:
                raise ContextMismatch(f'scalar of {value.field} used in {self}')
            return value

        if isinstance(value, bool):
            raise TypeError('booleans are not scalars')

        if isinstance(value, int):
            return Scalar.from_int(self, value)

        if isinstance(value, Fraction):
            return Scalar.from_fraction(self, value)

        raise TypeError(f'cannot coerce {type(value).__name__} to a scalar')

    def pi_power(self, s: int) -> 'Scalar':
        """ Exact π^s for any integer s. """

        return Scalar(self, s, self._one_unit(), None)

    def zero(self) -> 'Scalar':
        return Scalar(self, None, (), None)

    def one(self) -> 'Scalar':
        return Scalar(self, 0, self._one_unit(), None)

    def _one_unit(self) -> Tuple[int, ...]:
        return (1,) + (0,) * (self.f - 1)


ScalarLike = Union[int, Fraction, 'Scalar']


def make_field(p: int, f: int = 1, N: int = 8) -> FieldContext:
    """ Builds the context of the unramified extension of Q_p of degree f, worked modulo p^N. """

    if not isinstance(p, int) or not isprime(p):
        raise NonPrime(f'{p} is not a prime')

    if f < 1 or N < 1:
        raise ValueError('f and N must be positive')

    residue_poly = _residue_polynomial(p, f) if f > 1 else None
    Log.debug('coeffring', f'field p={p} f={f} N={N} residue_poly={residue_poly}')
    return FieldContext(p, f, N, residue_poly)


@lru_cache(maxsize=None)
def _residue_polynomial(p: int, f: int) -> Tuple[int, ...]:
    """ First monic irreducible polynomial of degree f over F_p in lexicographic order of coefficients. """

    for lower in itertools.product(range(p), repeat=f):
        if lower[0] == 0:
            continue

        candidate = lower + (1,)
        # galoistools works with big-endian coefficient lists
        if gf_irreducible_p([ZZ(c) for c in reversed(candidate)], p, ZZ):
            return candidate

    raise NoIrreduciblePolynomialFound(f'no irreducible polynomial of degree {f} modulo {p}')


def _min_prec(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b

    if b is None:
        return a

    return min(a, b)


def _poly_mul(a: Tuple[int, ...], b: Tuple[int, ...], modulus_poly: Tuple[int, ...]) -> Tuple[int, ...]:
    """ Product of two polynomials of degree < f reduced by the monic modulus polynomial. """

    f = len(a)
    if f == 1:
        return (a[0] * b[0],)

    product = [0] * (2 * f - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                product[i + j] += x * y

    for k in range(2 * f - 2, f - 1, -1):
        c = product[k]
        if c:
            for i in range(f):
                product[k - f + i] -= c * modulus_poly[i]

    return tuple(product[:f])


def _unit_inverse(field: FieldContext, unit: Tuple[int, ...], digits: int) -> Tuple[int, ...]:
    """ Inverse of a unit of Z_q modulo p^digits. """

    p = field.p
    modulus = p ** digits
    if field.f == 1:
        return (pow(unit[0] % modulus, -1, modulus),)

    # Inverse modulo p by the extended Euclidean algorithm over F_p, then Newton lifting.
    big_endian = [ZZ(c % p) for c in reversed(unit)]
    while big_endian and big_endian[0] == 0:
        big_endian.pop(0)
    s, _, h = gf_gcdex(big_endian, [ZZ(c) for c in reversed(field.modulus_poly)], p, ZZ)
    if h != [ZZ(1)]:
        raise DivisionByZero('unit part is not invertible modulo p')

    y = [int(c) for c in reversed(s)]
    y = tuple(y + [0] * (field.f - len(y)))
    reached = 1
    while reached < digits:
        reached = min(2 * reached, digits)
        m = p ** reached
        uy = _poly_mul(unit, y, field.modulus_poly)
        correction = tuple((-c) % m for c in uy)
        correction = ((correction[0] + 2) % m,) + correction[1:]
        y = tuple(c % m for c in _poly_mul(y, correction, field.modulus_poly))

    return tuple(c % modulus for c in y)


class Scalar:
    """
    Element p^val * unit of K. `val` is None for zero; `prec` is the absolute precision (None when exact).
    An inexact zero has val None and a finite prec: it is O(p^prec).
    """

    __slots__ = ('field', 'val', 'unit', 'prec')

    def __init__(self, field: FieldContext, val: Optional[int], unit: Tuple[int, ...], prec: Optional[int]):
        self.field = field
        self.val = val
        self.unit = unit
        self.prec = prec

    @classmethod
    def _make(cls, field: FieldContext, val: int, coeffs: Tuple[int, ...], prec: Optional[int]) -> 'Scalar':
        """ Normalizes p^val * coeffs known modulo p^prec. """

        p = field.p
        if prec is not None:
            digits = prec - val
            if digits <= 0:
                return cls(field, None, (), prec)
            modulus = p ** digits
            coeffs = tuple(c % modulus for c in coeffs)

        if not any(coeffs):
            return cls(field, None, (), prec)

        while all(c % p == 0 for c in coeffs):
            coeffs = tuple(c // p for c in coeffs)
            val += 1

        return cls(field, val, coeffs, prec)

    @classmethod
    def from_int(cls, field: FieldContext, n: int) -> 'Scalar':
        if n == 0:
            return field.zero()

        return cls._make(field, 0, (n,) + (0,) * (field.f - 1), None)

    @classmethod
    def from_fraction(cls, field: FieldContext, x: Fraction) -> 'Scalar':
        x = Fraction(x)
        numerator = cls.from_int(field, x.numerator)
        if x.denominator == 1:
            return numerator

        return numerator * cls.from_int(field, x.denominator).inverse()

    @classmethod
    def from_coefficients(cls, field: FieldContext, coeffs, prec: Optional[int] = None) -> 'Scalar':
        """ Builds sum c_i x^i from integer coefficients in the generator x of the residue extension. """

        coeffs = tuple(coeffs) + (0,) * (field.f - len(coeffs))
        if len(coeffs) != field.f:
            raise ContextMismatch(f'expected at most {field.f} coefficients')

        return cls._make(field, 0, coeffs, prec)

    @property
    def is_zero(self) -> bool:
        """ True for exact zeros and for inexact zeros O(p^k). """

        return self.val is None

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def valuation(self):
        """ π-adic valuation; +∞ for zeros. """

        return INFINITY if self.val is None else self.val

    def vanishes(self, prec: Optional[int] = None) -> bool:
        """ True when the scalar is zero modulo π^prec (default: the working precision N). """

        if self.val is None:
            return True

        return self.val >= (self.field.N if prec is None else prec)

    def equals_at(self, other: ScalarLike, prec: Optional[int] = None) -> bool:
        return (self - other).vanishes(prec)

    def _coerce(self, other: ScalarLike) -> 'Scalar':
        if isinstance(other, Scalar):
            if other.field is not self.field and other.field != self.field:
                raise ContextMismatch('scalars from different fields')
            return other

        return self.field.scalar(other)

    def __add__(self, other: ScalarLike) -> 'Scalar':
        other = self._coerce(other)
        field = self.field

        if self.val is None:
            if self.prec is None:
                return other
            if other.val is None:
                return Scalar(field, None, (), _min_prec(self.prec, other.prec))
            return Scalar._make(field, other.val, other.unit, _min_prec(self.prec, other.prec))

        if other.val is None:
            return other + self

        v0 = min(self.val, other.val)
        p = field.p
        sa = p ** (self.val - v0)
        sb = p ** (other.val - v0)
        coeffs = tuple(a * sa + b * sb for a, b in zip(self.unit, other.unit))
        return Scalar._make(field, v0, coeffs, _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self) -> 'Scalar':
        if self.val is None:
            return self

        return Scalar._make(self.field, self.val, tuple(-c for c in self.unit), self.prec)

    def __sub__(self, other: ScalarLike) -> 'Scalar':
        return self + (-self._coerce(other))

    def __rsub__(self, other: ScalarLike) -> 'Scalar':
        return self._coerce(other) - self

    def __mul__(self, other: ScalarLike) -> 'Scalar':
        other = self._coerce(other)
        field = self.field

        if self.val is None or other.val is None:
            if (self.val is None and self.prec is None) or (other.val is None and other.prec is None):
                return field.zero()
            if self.val is None and other.val is None:
                return Scalar(field, None, (), self.prec + other.prec)
            if self.val is None:
                return Scalar(field, None, (), self.prec + other.val)
            return Scalar(field, None, (), other.prec + self.val)

        val = self.val + other.val
        unit = _poly_mul(self.unit, other.unit, field.modulus_poly)
        prec = _min_prec(
            None if other.prec is None else self.val + other.prec,
            None if self.prec is None else other.val + self.prec,
        )
        return Scalar._make(field, val, unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> 'Scalar':
        if self.val is None:
            raise DivisionByZero('inverse of a zero scalar')

        field = self.field
        one = field._one_unit()
        if self.prec is None and (self.unit == one or self.unit == tuple(-c for c in one)):
            return Scalar(field, -self.val, self.unit, None)

        digits = field.N if self.prec is None else self.prec - self.val
        unit = _unit_inverse(field, self.unit, digits)
        return Scalar._make(field, -self.val, unit, -self.val + digits)

    def __truediv__(self, other: ScalarLike) -> 'Scalar':
        return self * self._coerce(other).inverse()

    def __pow__(self, exponent: int) -> 'Scalar':
        if exponent < 0:
            return self.inverse() ** (-exponent)

        result = self.field.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1

        return result

    def with_precision(self, prec: Optional[int]) -> 'Scalar':
        """ Forgets digits beyond the absolute precision prec. """

        prec = _min_prec(self.prec, prec)
        if self.val is None:
            return Scalar(self.field, None, (), prec)

        return Scalar._make(self.field, self.val, self.unit, prec)

    def to_fraction(self) -> Fraction:
        """ Rational representative; only defined over the prime field. """

        if self.field.f != 1:
            raise ContextMismatch('rational representatives exist only over Q_p')

        if self.val is None:
            return Fraction(0)

        return Fraction(self.unit[0]) * Fraction(self.field.p) ** self.val

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented

        return (self.field == other.field and self.val == other.val and self.unit == other.unit
                and self.prec == other.prec)

    def __hash__(self) -> int:
        return hash((self.val, self.unit, self.prec))

    def __repr__(self) -> str:
        p = self.field.p
        tail = '' if self.prec is None else f' + O({p}^{self.prec})'
        if self.val is None:
            return f'Scalar(0{tail})' if tail else 'Scalar(0)'

        unit = self.unit[0] if self.field.f == 1 else list(self.unit)
        return f'Scalar({p}^{self.val}*{unit}{tail})'


def embed(x: Scalar, into: FieldContext) -> Scalar:
    """ Image of x under the embedding of its field into the unramified extension `into`. """

    source = x.field
    if source == into:
        return x

    if source.p != into.p or into.f % source.f != 0:
        raise ContextMismatch(f'cannot embed degree {source.f} field into degree {into.f} field')

    if x.val is None:
        return Scalar(into, None, (), x.prec)

    if source.f == 1:
        image = Scalar._make(into, x.val, (x.unit[0],) + (0,) * (into.f - 1), x.prec)
        return image

    root = _generator_image(source, into)
    image = into.zero()
    power = into.one()
    for c in x.unit:
        if c:
            image = image + Scalar.from_int(into, c) * power
        power = power * root

    return (image * into.pi_power(x.val)).with_precision(x.prec)


@lru_cache(maxsize=None)
def _generator_image(source: FieldContext, into: FieldContext) -> Scalar:
    """ Hensel-lifted root in `into` of the polynomial defining `source`. """

    p = into.p
    if p ** into.f > MAX_EMBEDDING_SEARCH:
        raise ContextMismatch(f'residue field of size {p}^{into.f} too large for root search')

    poly = source.modulus_poly

    def evaluate(z: Scalar) -> Scalar:
        total = into.zero()
        for c in reversed(poly):
            total = total * z + Scalar.from_int(into, c)
        return total

    def derivative(z: Scalar) -> Scalar:
        total = into.zero()
        for k in range(len(poly) - 1, 0, -1):
            total = total * z + Scalar.from_int(into, k * poly[k])
        return total

    for coeffs in itertools.product(range(p), repeat=into.f):
        if not any(coeffs):
            continue
        z = Scalar.from_coefficients(into, coeffs)
        if evaluate(z).vanishes(1):
            break
    else:
        raise NoIrreduciblePolynomialFound('residue polynomial has no root in the extension')

    for _ in range(into.N.bit_length() + 1):
        z = (z - evaluate(z) / derivative(z)).with_precision(into.N)

    Log.debug('coeffring', f'generator of degree {source.f} field embedded as {z}')
    return z
