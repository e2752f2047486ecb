"""
Γ-filtered and Γ-graded modules for Γ = Z or Q, kept in split coordinates: a filtration is the coordinate flag
of an (optional) ambient basis, described by its jumps and the rank of each graded piece.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .exceptions import FiltrationError, ZeroScale
from .matrix import Matrix
from .phimod import SlopeCertificate, slope_sort_order

Rational = Union[int, Fraction, str]


@dataclass(frozen=True)
class FilteredModule:
    jumps: Tuple[Fraction, ...]
    ranks: Tuple[int, ...]
    U: Optional[Matrix] = None

    def __post_init__(self):
        object.__setattr__(self, 'jumps', tuple(Fraction(j) for j in self.jumps))
        object.__setattr__(self, 'ranks', tuple(int(r) for r in self.ranks))

        if len(self.jumps) != len(self.ranks):
            raise FiltrationError('jumps and ranks differ in length')

        if any(r < 1 for r in self.ranks):
            raise FiltrationError(f'ranks {self.ranks} must be positive')

        if any(a >= b for a, b in zip(self.jumps, self.jumps[1:])):
            raise FiltrationError(f'jumps {self.jumps} are not strictly increasing')

        if self.U is not None and self.U.dim != self.dim:
            raise FiltrationError('ambient basis does not match the total rank')

    @property
    def dim(self) -> int:
        return sum(self.ranks)

    def step_rank(self, gamma: Rational) -> int:
        """ rank F^γ = sum of the ranks at jumps ≤ γ. """

        gamma = Fraction(gamma)
        return sum(r for j, r in zip(self.jumps, self.ranks) if j <= gamma)


@dataclass(frozen=True)
class GradedModule:
    components: Tuple[Tuple[Fraction, int], ...]

    def __post_init__(self):
        merged: Dict[Fraction, int] = {}
        for degree, rank in self.components:
            merged[Fraction(degree)] = merged.get(Fraction(degree), 0) + int(rank)

        if any(r < 1 for r in merged.values()):
            raise FiltrationError('graded ranks must be positive')

        object.__setattr__(self, 'components', tuple(sorted(merged.items())))

    @classmethod
    def from_mapping(cls, components: Mapping[Rational, int]) -> 'GradedModule':
        return cls(tuple((Fraction(k), v) for k, v in components.items()))

    def as_dict(self) -> Dict[Fraction, int]:
        return dict(self.components)

    def rank(self, degree: Rational) -> int:
        return self.as_dict().get(Fraction(degree), 0)

    @property
    def dim(self) -> int:
        return sum(r for _, r in self.components)


def gr(F: FilteredModule) -> GradedModule:
    return GradedModule(tuple(zip(F.jumps, F.ranks)))


def fil(G: GradedModule, U: Optional[Matrix] = None) -> FilteredModule:
    degrees = tuple(d for d, _ in G.components)
    ranks = tuple(r for _, r in G.components)
    return FilteredModule(degrees, ranks, U)


def relabel(F: FilteredModule, gamma: Rational) -> FilteredModule:
    """ [γ]_*: jumps multiplied by γ > 0. Negative γ would reverse the order of the jumps and is refused. """

    gamma = Fraction(gamma)
    if gamma == 0:
        raise ZeroScale('relabelling by 0')

    if gamma < 0:
        raise FiltrationError(f'relabelling by negative {gamma} reverses the filtration')

    return FilteredModule(tuple(j * gamma for j in F.jumps), F.ranks, F.U)


def graded_convolution(G1: GradedModule, G2: GradedModule) -> GradedModule:
    """ Degree γ of G1 ⊗ G2 has rank Σ_{γ'+γ''=γ} rank G1_γ' * rank G2_γ''. """

    total: Dict[Fraction, int] = {}
    for a, r in G1.components:
        for b, s in G2.components:
            total[a + b] = total.get(a + b, 0) + r * s

    return GradedModule(tuple(total.items()))


def tensor_filtration(F1: FilteredModule, F2: FilteredModule) -> FilteredModule:
    U = None
    if F1.U is not None and F2.U is not None:
        labels1 = [j for j, r in zip(F1.jumps, F1.ranks) for _ in range(r)]
        labels2 = [j for j, r in zip(F2.jumps, F2.ranks) for _ in range(r)]
        order = slope_sort_order([a + b for a in labels1 for b in labels2])
        U = F1.U.kron(F2.U)
        U = U.submatrix(range(U.nrows), order)

    return fil(graded_convolution(gr(F1), gr(F2)), U)


def contained_in(F1: FilteredModule, F2: FilteredModule) -> bool:
    """ F1^γ ⊆ F2^γ for every γ, for two flags of the same ambient basis. """

    if F1.dim != F2.dim or F1.U != F2.U:
        raise FiltrationError('filtrations of different ambient bases')

    return all(F1.step_rank(g) <= F2.step_rank(g) for g in set(F1.jumps) | set(F2.jumps))


def lcm_denominator(jump_lists: Iterable[Iterable[Rational]]) -> int:
    """ Least m ≥ 1 with m·x integral for every jump x. """

    result = 1
    for jumps in jump_lists:
        for x in jumps:
            result = result * Fraction(x).denominator // math.gcd(result, Fraction(x).denominator)

    return result


def filtration_from_certificate(C: SlopeCertificate) -> FilteredModule:
    return FilteredModule(C.jumps, C.ranks, C.U)


def integral_filtration(F: FilteredModule) -> Tuple[int, FilteredModule]:
    """ (d, [d]_*F) for the least common denominator d, so that F = [1/d]_* of a Z-filtration. """

    d = lcm_denominator([F.jumps])
    return d, relabel(F, d)
