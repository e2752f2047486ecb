"""
Hypothesis strategies shared by the test modules. Supports stay small so that products and Frobenius images
of sampled values remain inside the windows used by the tests.
"""

from hypothesis import strategies as st

from phinabla.matrix import Matrix
from phinabla.robba import RingContext


def elements(ring: RingContext, exponents=(-4, 4), coefficients=(-20, 20), max_terms: int = 4):
    return st.dictionaries(st.integers(*exponents), st.integers(*coefficients), max_size=max_terms).map(
        ring.element)


def nonzero_elements(ring: RingContext, **kwargs):
    return elements(ring, **kwargs).filter(lambda x: not x.is_zero)


def units(ring: RingContext, exponents=(-3, 3)):
    """ c t^i (1 + ε) with c prime to p and every term of ε divisible by p and of degree above i. """

    p = ring.field.p

    def build(args):
        i, c, perturbation = args
        terms = {i: c}
        for j, e in perturbation.items():
            terms[i + j] = terms.get(i + j, 0) + p * e
        return ring.element(terms)

    unit_coefficients = st.integers(-30, 30).filter(lambda c: c % p != 0)
    perturbations = st.dictionaries(st.integers(0, 2), st.integers(-5, 5), max_size=3)
    return st.tuples(st.integers(*exponents), unit_coefficients, perturbations).map(build)


def matrices(ring: RingContext, n: int, **kwargs):
    return st.lists(st.lists(elements(ring, **kwargs), min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: Matrix(ring, rows))
