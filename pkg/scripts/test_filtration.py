from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phinabla.coeffring import make_field
from phinabla.exceptions import FiltrationError, ZeroScale
from phinabla.filtration import (FilteredModule, GradedModule, contained_in, fil, filtration_from_certificate, gr,
                                 integral_filtration, lcm_denominator, relabel, tensor_filtration)
from phinabla.matrix import Matrix
from phinabla.robba import make_ring
from phinabla.seeds import split_seed

Q3 = make_field(3, 1, 8)
R3 = make_ring(Q3, (-32, 32))

JUMPS = [Fraction(k) for k in range(-2, 3)] + [Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3)]


@st.composite
def filtrations(draw):
    jumps = sorted(draw(st.sets(st.sampled_from(JUMPS), min_size=1, max_size=4)))
    ranks = draw(st.lists(st.integers(1, 3), min_size=len(jumps), max_size=len(jumps)))
    return FilteredModule(tuple(jumps), tuple(ranks))


def test_graded_pieces():
    assert gr(FilteredModule((0, 1), (1, 1))).as_dict() == {0: 1, 1: 1}
    assert gr(FilteredModule(('1/2',), (2,))).as_dict() == {Fraction(1, 2): 2}


def test_filtration_of_grading():
    F = fil(GradedModule.from_mapping({0: 2}))
    assert F.jumps == (0,)
    assert F.ranks == (2,)

    F = fil(GradedModule.from_mapping({2: 3, -1: 1}))
    assert F.jumps == (-1, 2)
    assert F.step_rank(0) == 1
    assert F.step_rank(2) == 4


def test_relabel():
    F = FilteredModule((0, 2), (1, 1))
    assert relabel(F, Fraction(1, 2)).jumps == (0, 1)
    assert relabel(relabel(F, 3), Fraction(1, 3)) == F


def test_relabel_by_zero():
    with pytest.raises(ZeroScale):
        relabel(FilteredModule((0,), (1,)), 0)


def test_relabel_by_negative_scale():
    with pytest.raises(FiltrationError) as error:
        relabel(FilteredModule((0, 1), (1, 1)), -1)

    assert not isinstance(error.value, ZeroScale)


def test_tensor_of_two_step_filtrations():
    F = FilteredModule((0, 1), (1, 1))
    assert gr(tensor_filtration(F, F)).as_dict() == {0: 1, 1: 2, 2: 1}


def test_tensor_with_trivial_filtration():
    F = FilteredModule(('-1/2', 1), (2, 1))
    trivial = FilteredModule((0,), (1,))
    assert tensor_filtration(F, trivial) == F


def test_tensor_carries_sorted_basis():
    U = Matrix.identity(R3, 2)
    F = FilteredModule((0, 1), (1, 1), U)
    G = FilteredModule((-1, 0), (1, 1), U)
    product = tensor_filtration(F, G)
    assert product.jumps == (-1, 0, 1)
    assert product.ranks == (1, 2, 1)
    assert product.U == Matrix.identity(R3, 4)


def test_invalid_filtrations():
    with pytest.raises(FiltrationError):
        FilteredModule((1, 0), (1, 1))

    with pytest.raises(FiltrationError):
        FilteredModule((0,), (0,))

    with pytest.raises(FiltrationError):
        FilteredModule((0, 1), (1,))


def test_lcm_denominator():
    assert lcm_denominator([[Fraction(1, 2), Fraction(1, 3)]]) == 6
    assert lcm_denominator([[0]]) == 1
    assert lcm_denominator([]) == 1
    assert lcm_denominator([[Fraction(1, 2)], [Fraction(2, 3)]]) == 6


def test_filtration_of_certificate():
    _, C = split_seed(R3, [(0, 1), (Fraction(1, 2), 2)])
    F = filtration_from_certificate(C)
    assert F.jumps == (0, Fraction(1, 2))
    assert F.ranks == (1, 2)
    assert F.U == C.U

    d, FZ = integral_filtration(F)
    assert d == 2
    assert FZ.jumps == (0, 1)


def test_containment():
    F = FilteredModule((0, 1), (1, 1))
    G = FilteredModule((-1, 1), (1, 1))
    assert contained_in(F, G)
    assert not contained_in(G, FilteredModule((0, 2), (1, 1)))


class TestFiltrations:
    @given(filtrations())
    def test_grading_round_trip(self, F):
        assert fil(gr(F)) == F
        assert gr(fil(gr(F))) == gr(F)

    @given(filtrations(), filtrations())
    def test_tensor_step_ranks(self, F1, F2):
        product = tensor_filtration(F1, F2)
        assert product.dim == F1.dim * F2.dim
        for gamma in set(product.jumps):
            expected = sum(r * s for a, r in zip(F1.jumps, F1.ranks) for b, s in zip(F2.jumps, F2.ranks)
                           if a + b <= gamma)
            assert product.step_rank(gamma) == expected

    @given(filtrations())
    def test_integral_relabelling(self, F):
        d, FZ = integral_filtration(F)
        assert all(j.denominator == 1 for j in FZ.jumps)
        assert relabel(FZ, Fraction(1, d)) == F

    @given(filtrations(), st.integers(1, 6))
    def test_denominator_after_relabelling(self, F, d):
        assert lcm_denominator([relabel(F, d).jumps]) * d % lcm_denominator([F.jumps]) == 0
