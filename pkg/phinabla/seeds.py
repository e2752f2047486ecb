"""
Seeded constructions: standard pure modules, tame Kummer seeds and their witnesses, block-split seeds and
their unipotent scramblings with stored certificates. All randomness comes from a `random.Random`.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from .exceptions import SlopeError, WildRamification
from .gstruct import GL, SL, GPair, make_group, morphism_apply
from .matrix import Matrix
from .phimod import (CertificateBlock, Module, PhiModule, PhiNablaModule, SlopeCertificate, build_module,
                     connection_matrix)
from .robba import ExtensionContext, RingContext

BlockSpec = Tuple[Union[Fraction, int, str], int]


def standard_module(ring: RingContext, s: int, r: int, signed: bool = False) -> PhiModule:
    """
    Companion module A e_i = e_(i+1), A e_r = π^s e_1 of slope s/r, with det = (-1)^(r-1) π^s.
    `signed` flips the corner by (-1)^(r-1) so that det = π^s.
    """

    if r < 1:
        raise SlopeError(f'rank {r} must be positive')

    corner = ring.field.pi_power(s)
    if signed and r % 2 == 0:
        corner = -corner

    zero = ring.zero()
    rows = [[zero] * r for _ in range(r)]
    rows[0][r - 1] = ring.constant(corner)
    for i in range(r - 1):
        rows[i + 1][i] = ring.one()

    return PhiModule(Matrix(ring, rows))


def zero_connection(M: Module) -> PhiNablaModule:
    """ M with N = 0; compatible exactly when A is constant. """

    return PhiNablaModule(M if isinstance(M, PhiModule) else M.base, Matrix.zeros(M.ring, M.dim))


def _kummer_exponent(ring: RingContext, a: int, m: int) -> int:
    if m < 1 or math.gcd(m, ring.field.p) != 1:
        raise WildRamification(f'Kummer degree {m} is not prime to p = {ring.field.p}')

    if ((ring.q - 1) * a) % m:
        raise SlopeError(f'{m} does not divide (q-1)*{a} = {(ring.q - 1) * a}')

    return (ring.q - 1) * a // m


def kummer_seed(ring: RingContext, a: int, m: int) -> PhiNablaModule:
    """ Rank one: A = t^((q-1)a/m), N = (a/m) t^-1, trivialized over t = u^m by u^a. """

    e = _kummer_exponent(ring, a, m)
    A = Matrix(ring, [[ring.monomial(e)]])
    N = Matrix(ring, [[ring.monomial(-1, Fraction(a, m))]])
    return PhiNablaModule(PhiModule(A), N)


def kummer_sl2_pair(ring: RingContext, a: int, m: int) -> GPair:
    """ The Kummer seed and its dual side by side in SL(2). """

    e = _kummer_exponent(ring, a, m)
    c = Fraction(a, m)
    g = Matrix.diagonal(ring, [ring.monomial(e), ring.monomial(-e)])
    X = Matrix.diagonal(ring, [ring.monomial(-1, c), ring.monomial(-1, -c)])
    return GPair(make_group(SL, 2), g, X)


def kummer_witness(ext: ExtensionContext, a: int, d: int = 2) -> Matrix:
    """ diag(u^a, u^-a) over R_L, or (u^a) in rank one. """

    inner = ext.inner
    if d == 1:
        return Matrix(inner, [[inner.monomial(a)]])

    return Matrix.diagonal(inner, [inner.monomial(a), inner.monomial(-a)])


def parse_blocks(text: str) -> List[Tuple[Fraction, int]]:
    """ "SLOPE:RANK,..." -> [(slope, rank), ...]. """

    blocks = []
    for item in text.split(','):
        slope, _, rank = item.strip().partition(':')
        try:
            block = Fraction(slope), int(rank or 1)
        except (ValueError, ZeroDivisionError) as error:
            raise SlopeError(f'bad block {item.strip()!r}: {error}') from error
        if block[1] < 1:
            raise SlopeError(f'bad block {item.strip()!r}: rank must be positive')
        blocks.append(block)

    return blocks


def split_seed(ring: RingContext, blocks: Sequence[BlockSpec], signed: bool = False
               ) -> Tuple[PhiNablaModule, SlopeCertificate]:
    """ Direct sum of standard modules, one block per (slope, rank) in increasing slope order, N = 0. """

    cert_blocks = []
    matrices = []
    for slope, rank in blocks:
        slope = Fraction(slope)
        s, r = slope.numerator, slope.denominator
        if rank < 1 or rank % r:
            raise SlopeError(f'rank {rank} is not a positive multiple of {r}')
        for _ in range(rank // r):
            matrices.append(standard_module(ring, s, r, signed).A)
        cert_blocks.append(CertificateBlock(rank, slope))

    jumps = [b.slope for b in cert_blocks]
    if any(a >= b for a, b in zip(jumps, jumps[1:])):
        raise SlopeError(f'block slopes {[str(j) for j in jumps]} must increase')

    A = Matrix.direct_sum(*matrices)
    module = build_module(A, Matrix.zeros(ring, A.dim))
    return module, SlopeCertificate(Matrix.identity(ring, A.dim), tuple(cert_blocks))


def random_unipotent(ring: RingContext, d: int, rng: random.Random) -> Matrix:
    """ L U with L lower unipotent (entries c t^k, k in {-1, 0, 1}) and U upper unipotent constant. """

    zero = ring.zero()
    one = ring.one()
    lower = [[one if i == j else zero for j in range(d)] for i in range(d)]
    upper = [[one if i == j else zero for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(i):
            lower[i][j] = ring.monomial(rng.choice((-1, 0, 1)), rng.randint(-2, 2))
        for j in range(i + 1, d):
            upper[i][j] = ring.constant(rng.randint(-2, 2))

    return Matrix(ring, lower) @ Matrix(ring, upper)


@dataclass(frozen=True)
class ScrambledSeed:
    module: PhiNablaModule
    pair: GPair
    certificate: SlopeCertificate
    planted: GPair


def scrambled_seed(ring: RingContext, blocks: Sequence[BlockSpec], rng: random.Random,
                   group_kind: str = GL) -> ScrambledSeed:
    """
    Split seed moved by a random unipotent x; the certificate basis is x itself, since base change by x
    undoes the morphism.
    """

    split, certificate = split_seed(ring, blocks, signed=group_kind == SL)
    group = make_group(group_kind, split.dim)
    planted = GPair(group, split.A, connection_matrix(split))
    x = random_unipotent(ring, split.dim, rng)
    pair = morphism_apply(x, planted)
    module = build_module(pair.g, pair.X)
    return ScrambledSeed(module, pair, SlopeCertificate(x, certificate.blocks), planted)
