"""
Truncated Robba ring: Laurent polynomials over K with a support window [w_lo, w_hi].

Terms pushed outside the window are dropped and the result carries `window_loss`. Every element also carries
the lowest absolute precision met while computing it (`prec`, None when everything stayed exact), so that
verdicts computed from it can be downgraded honestly.

A ring may be a tame Kummer extension R_L in the variable u with t = u^m (`kummer_m = m`). Its derivation is
still d/dt, written (1/m) u^(1-m) d/du, so gauge calculus is the same code over R and R_L.
"""

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Optional, Tuple

from .coeffring import INFINITY, FieldContext, Scalar, ScalarLike, _min_prec, embed, make_field
from .exceptions import ContextMismatch, NotInvertibleAtPrecision, UnsupportedFrobeniusLift, WildRamification
from .logger import Log

DEFAULT_WINDOW = (-32, 32)


@dataclass(frozen=True)
class RingContext:
    field: FieldContext
    window: Tuple[int, int] = DEFAULT_WINDOW
    frob_q: int = 0  # 0 means field.q
    lift_terms: Optional[Tuple[Tuple[int, Scalar], ...]] = None  # image of the variable under φ; None is u^q
    kummer_m: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'window', tuple(self.window))
        lo, hi = self.window
        if not lo <= 0 <= hi:
            raise ValueError(f'window {self.window} must contain 0')

        if self.frob_q == 0:
            object.__setattr__(self, 'frob_q', self.field.q)

    @property
    def q(self) -> int:
        return self.frob_q

    @property
    def default_lift(self) -> bool:
        return self.lift_terms is None

    @property
    def width(self) -> int:
        return self.window[1] - self.window[0]

    def element(self, terms: Mapping[int, ScalarLike]) -> 'RobbaElement':
        raw = {i: self.field.scalar(c) for i, c in terms.items()}
        return RobbaElement._build(self, raw, False, None)

    def monomial(self, i: int, c: ScalarLike = 1) -> 'RobbaElement':
        return self.element({i: c})

    def constant(self, c: ScalarLike) -> 'RobbaElement':
        return self.element({0: c})

    def zero(self) -> 'RobbaElement':
        return RobbaElement(self, {}, False, None)

    def one(self) -> 'RobbaElement':
        return self.constant(1)

    @property
    def variable(self) -> 'RobbaElement':
        """ The ring variable: t for R, u for a Kummer extension. """

        return self.monomial(1)

    @property
    def t(self) -> 'RobbaElement':
        return self.monomial(self.kummer_m)

    @property
    def frob_image(self) -> 'RobbaElement':
        """ φ of the ring variable. """

        if self.lift_terms is None:
            return self.monomial(self.q)

        return self.element(dict(self.lift_terms))


def make_ring(field: FieldContext, window: Tuple[int, int] = DEFAULT_WINDOW,
              frob_image: Optional[Mapping[int, ScalarLike]] = None) -> RingContext:
    """ Builds R over `field`; `frob_image` gives the terms of a Frobenius lift u(t) ≡ t^q mod π. """

    ring = RingContext(field, tuple(window))
    if frob_image is None:
        return ring

    lift = ring.element(frob_image)
    if lift.window_loss:
        raise ValueError('Frobenius lift does not fit in the window')

    difference = lift - ring.monomial(ring.q)
    if any(c.val < 1 for c in difference.terms.values()):
        raise ValueError('Frobenius lift must reduce to t^q modulo π')

    terms = tuple(sorted(lift.terms.items()))
    if terms == ((ring.q, field.one()),):
        return ring

    Log.debug('robba', f'non-default Frobenius lift with {len(terms)} terms')
    return RingContext(field, tuple(window), 0, terms)


def _shift_prec(prec: Optional[int], by) -> Optional[int]:
    if prec is None or by == INFINITY:
        return None

    return prec + by


class RobbaElement:
    """ Immutable truncated Laurent polynomial. `terms` maps exponents to non-zero scalars. """

    __slots__ = ('ring', 'terms', 'window_loss', 'prec')

    def __init__(self, ring: RingContext, terms: Dict[int, Scalar], window_loss: bool, prec: Optional[int]):
        self.ring = ring
        self.terms = terms
        self.window_loss = window_loss
        self.prec = prec

    @classmethod
    def _build(cls, ring: RingContext, raw: Mapping[int, Scalar], window_loss: bool,
               prec: Optional[int]) -> 'RobbaElement':
        """ Drops zeros and out-of-window terms, recording what was lost. """

        lo, hi = ring.window
        terms = {}
        for i, c in raw.items():
            if c.prec is not None:
                prec = c.prec if prec is None else min(prec, c.prec)
            if c.val is None:
                continue
            if i < lo or i > hi:
                window_loss = True
                continue
            terms[i] = c

        return cls(ring, terms, window_loss, prec)

    def _same_ring(self, other: 'RobbaElement'):
        if other.ring is not self.ring and other.ring != self.ring:
            raise ContextMismatch('elements of different rings')

    def _coerce(self, other) -> 'RobbaElement':
        if isinstance(other, RobbaElement):
            self._same_ring(other)
            return other

        return self.ring.constant(other)

    @property
    def field(self) -> FieldContext:
        return self.ring.field

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def precision(self) -> int:
        """ Absolute precision the element is known to, capped by N. """

        N = self.field.N
        return N if self.prec is None else min(N, self.prec)

    def coefficient(self, i: int) -> Scalar:
        return self.terms.get(i, self.field.zero())

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.terms))

    def min_valuation(self):
        if not self.terms:
            return INFINITY

        return min(c.val for c in self.terms.values())

    def vanishes(self, prec: Optional[int] = None) -> bool:
        """ True when every coefficient is zero modulo π^prec (default N). """

        return all(c.vanishes(prec) for c in self.terms.values())

    def equals_at(self, other, prec: Optional[int] = None) -> bool:
        return (self - other).vanishes(prec)

    def __add__(self, other) -> 'RobbaElement':
        other = self._coerce(other)
        raw = dict(self.terms)
        for i, c in other.terms.items():
            raw[i] = raw[i] + c if i in raw else c

        return RobbaElement._build(self.ring, raw, self.window_loss or other.window_loss,
                                   _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self) -> 'RobbaElement':
        return RobbaElement(self.ring, {i: -c for i, c in self.terms.items()}, self.window_loss, self.prec)

    def __sub__(self, other) -> 'RobbaElement':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'RobbaElement':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'RobbaElement':
        if not isinstance(other, RobbaElement):
            return self.scale(other)

        self._same_ring(other)
        lo, hi = self.ring.window
        raw: Dict[int, Scalar] = {}
        lost = False
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = i + j
                if k < lo or k > hi:
                    lost = True
                    continue
                product = a * b
                raw[k] = raw[k] + product if k in raw else product

        prec = _min_prec(_shift_prec(self.prec, other.min_valuation()),
                         _shift_prec(other.prec, self.min_valuation()))
        return RobbaElement._build(self.ring, raw, lost or self.window_loss or other.window_loss, prec)

    def __rmul__(self, other) -> 'RobbaElement':
        return self.scale(other)

    def scale(self, c: ScalarLike) -> 'RobbaElement':
        c = self.field.scalar(c)
        raw = {i: a * c for i, a in self.terms.items()}
        return RobbaElement._build(self.ring, raw, self.window_loss, _shift_prec(self.prec, c.valuation()))

    def __pow__(self, exponent: int) -> 'RobbaElement':
        if exponent < 0:
            return self.invert() ** (-exponent)

        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base

        return result

    def derive(self) -> 'RobbaElement':
        """ d/dt. Over a Kummer ring t = u^m and d/dt = (1/m) u^(1-m) d/du. """

        m = self.ring.kummer_m
        field = self.field
        raw = {}
        for i, c in self.terms.items():
            if i == 0:
                continue
            raw[i - m] = c * Scalar.from_fraction(field, Fraction(i, m))

        return RobbaElement._build(self.ring, raw, self.window_loss, self.prec)

    def frobenius(self, n: int = 1) -> 'RobbaElement':
        """ n-fold iterate of φ; φ is the identity on coefficients. """

        if n < 0:
            raise ValueError('Frobenius iterate must be non-negative')

        result = self
        if self.ring.default_lift:
            if n == 0:
                return self
            factor = self.ring.q ** n
            raw = {i * factor: c for i, c in self.terms.items()}
            return RobbaElement._build(self.ring, raw, self.window_loss, self.prec)

        for _ in range(n):
            result = result._substitute_lift()

        return result

    def _substitute_lift(self) -> 'RobbaElement':
        ring = self.ring
        image = ring.frob_image
        total = ring.zero()
        if not self.terms:
            return RobbaElement(ring, {}, self.window_loss, self.prec)

        top = max(self.terms)
        bottom = min(self.terms)
        powers = {0: ring.one()}
        for k in range(1, max(top, 0) + 1):
            powers[k] = powers[k - 1] * image
        if bottom < 0:
            inverse = image.invert()
            for k in range(-1, bottom - 1, -1):
                powers[k] = powers[k + 1] * inverse

        for i, c in self.terms.items():
            total = total + powers[i].scale(c)

        return RobbaElement(ring, total.terms, total.window_loss or self.window_loss,
                            _min_prec(total.prec, self.prec))

    def gauss_valuation(self, r=0):
        """ min_i (val(c_i) + r*i) in the t-exponent scale; +∞ for zero. r = 0 is the 1-Gauss valuation. """

        if not self.terms:
            return INFINITY

        r = Fraction(r)
        m = self.ring.kummer_m
        return min(c.val + r * Fraction(i, m) for i, c in self.terms.items())

    def invert(self) -> 'RobbaElement':
        """
        Inverse through the dominant term c t^i0 (least exponent among the least valuations) and the geometric
        series of the remaining perturbation, iterated until the correction vanishes modulo π^N.
        """

        if not self.terms:
            raise NotInvertibleAtPrecision('zero has no inverse')

        ring = self.ring
        field = self.field
        N = field.N
        lo, hi = ring.window
        v0 = self.min_valuation()
        i0 = min(i for i, c in self.terms.items() if c.val == v0)
        if not lo <= -i0 <= hi:
            raise NotInvertibleAtPrecision(f'inverse of t^{i0} leaves the window {ring.window}')

        c_inv = self.terms[i0].inverse()
        minus_eps = {i - i0: -(c * c_inv) for i, c in self.terms.items() if i != i0}
        slo, shi = lo + i0, hi + i0

        one = field.one()
        total: Dict[int, Scalar] = {0: one}
        power: Dict[int, Scalar] = {0: one}
        lost = self.window_loss
        truncated = False
        cap = N * (1 + ring.width)
        for _ in range(cap):
            step: Dict[int, Scalar] = {}
            for i, a in power.items():
                for j, b in minus_eps.items():
                    k = i + j
                    if k < slo or k > shi:
                        lost = True
                        continue
                    product = a * b
                    step[k] = step[k] + product if k in step else product
            power = {k: c for k, c in step.items() if not c.vanishes(N)}
            truncated = truncated or any(not c.is_zero for k, c in step.items() if k not in power)
            if not power:
                break
            for k, c in power.items():
                total[k] = total[k] + c if k in total else c
        else:
            raise NotInvertibleAtPrecision(f'geometric series did not terminate within {cap} steps')

        raw = {k - i0: c * c_inv for k, c in total.items()}
        prec = _shift_prec(self.prec, -2 * v0)
        if truncated:
            # tail of the series has valuation >= N before rescaling by c^-1
            prec = _min_prec(prec, N - v0)
        return RobbaElement._build(ring, raw, lost, prec)

    def with_ring(self, ring: RingContext) -> 'RobbaElement':
        """ Same terms in another window of the same field; terms outside are dropped with loss recorded. """

        if ring.field != self.field:
            raise ContextMismatch('re-windowing requires the same coefficient field')

        return RobbaElement._build(ring, dict(self.terms), self.window_loss, self.prec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RobbaElement):
            return NotImplemented

        return (self.ring == other.ring and self.terms == other.terms and self.window_loss == other.window_loss
                and self.prec == other.prec)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return 'RobbaElement(0)'

        var = 't' if self.ring.kummer_m == 1 else 'u'
        body = ' + '.join(f'{c!r}*{var}^{i}' for i, c in sorted(self.terms.items()))
        flag = ', window_loss' if self.window_loss else ''
        return f'RobbaElement({body}{flag})'


@lru_cache(maxsize=None)
def mu_factor(ring: RingContext, n: int = 1) -> RobbaElement:
    """ μ(φ^n, t) = μ φ(μ) ... φ^(n-1)(μ) with μ = d(φ(t))/dt. """

    if n < 1:
        raise ValueError('mu_factor needs n >= 1')

    mu = ring.t.frobenius(1).derive()
    result = mu
    for k in range(1, n):
        result = result * mu.frobenius(k)

    return result


@dataclass(frozen=True)
class ExtensionContext:
    """ R_L for L = tame Kummer extension t = u^m composed with an unramified residue extension. """

    base: RingContext
    kummer_m: int
    unram_f2: int
    inner: RingContext = dataclass_field(compare=False)


def make_extension(base: RingContext, m: int, f2: Optional[int] = None) -> ExtensionContext:
    p = base.field.p
    if m < 1 or math.gcd(m, p) != 1:
        raise WildRamification(f'Kummer degree {m} is not prime to p = {p}')

    if not base.default_lift:
        raise UnsupportedFrobeniusLift('Kummer extensions are built for the lift t -> t^q only')

    if base.kummer_m != 1:
        raise ContextMismatch('base ring is already an extension')

    f = base.field.f
    f2 = f if f2 is None else f2
    if f2 % f != 0:
        raise ContextMismatch(f'residue degree {f2} is not a multiple of {f}')

    field = base.field if f2 == f else make_field(p, f2, base.field.N)
    lo, hi = base.window
    inner = RingContext(field, (m * lo, m * hi), base.q, None, m)
    Log.debug('robba', f'extension m={m} f2={f2} window={inner.window}')
    return ExtensionContext(base, m, f2, inner)


def pullback(x: RobbaElement, ext: ExtensionContext) -> RobbaElement:
    """ Substitutes t = u^m and embeds coefficients into the extension field. """

    if x.ring != ext.base:
        raise ContextMismatch('element does not live in the base ring of the extension')

    inner = ext.inner
    raw = {ext.kummer_m * i: embed(c, inner.field) for i, c in x.terms.items()}
    return RobbaElement._build(inner, raw, x.window_loss, x.prec)
