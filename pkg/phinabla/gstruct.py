"""
Classical groups over the truncated Robba ring and pairs (g, X) in G(R) x Lie(G)_R with X = Γ_g(μ φ(X)).

Orientation: slopes increase along the basis, so for the cocharacter λ of a certificate the unipotent radical
U(-λ) is the strictly block upper pattern. Every pattern is read from PATTERN_RULES.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import sympy

from .exceptions import GaugeIncompatible, MalformedCertificate, MembershipError, PatternViolation, RankError
from .filtration import lcm_denominator
from .logger import Log
from .matrix import Matrix, pi_diagonal
from .phimod import (Module, PhiModule, SlopeCertificate, build_module, connection_matrix,
                     frobenius_product, unit_root_check, verify_block)
from .report import Check, Report, boolean_check, residual_check
from .robba import ExtensionContext, RingContext, mu_factor
from .status import Status

GL = 'GL'
SL = 'SL'
SP = 'Sp'
SO = 'SO'
GROUP_KINDS = (GL, SL, SP, SO)

Form = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str
    d: int
    form: Optional[Form] = None

    def form_matrix(self, ring: RingContext) -> Matrix:
        return Matrix.constant(ring, self.form)

    def to_label(self) -> str:
        return f'{self.kind}({self.d})'


def _standard_form(kind: str, d: int) -> Form:
    if kind == SP:
        n = d // 2
        rows = [[0] * d for _ in range(d)]
        for i in range(n):
            rows[i][n + i] = 1
            rows[n + i][i] = -1
    else:
        rows = [[1 if i + j == d - 1 else 0 for j in range(d)] for i in range(d)]

    return tuple(tuple(Fraction(c) for c in row) for row in rows)


def make_group(kind: str, d: int, form: Optional[Sequence[Sequence]] = None) -> GroupDescriptor:
    """ Sp defaults to J = [[0, I], [-I, 0]], SO to the antidiagonal form. """

    if kind not in GROUP_KINDS:
        raise ValueError(f'unknown group kind {kind!r}')

    if d < 1:
        raise RankError('group of size 0')

    if kind in (GL, SL):
        return GroupDescriptor(kind, d)

    if kind == SP and d % 2:
        raise RankError(f'symplectic group needs even size, got {d}')

    if form is None:
        form = _standard_form(kind, d)
    form = tuple(tuple(Fraction(c) for c in row) for row in form)

    check = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in form])
    if check.shape != (d, d) or check.det() == 0:
        raise ValueError(f'{kind} form must be an invertible {d}x{d} matrix')

    if kind == SP and check.T != -check:
        raise ValueError('symplectic form must be antisymmetric')

    if kind == SO and check.T != check:
        raise ValueError('orthogonal form must be symmetric')

    return GroupDescriptor(kind, d, form)


@dataclass(frozen=True)
class GPair:
    group: GroupDescriptor
    g: Matrix
    X: Matrix
    frob_power: int = 1

    @property
    def ring(self) -> RingContext:
        return self.g.ring

    @property
    def dim(self) -> int:
        return self.g.dim


@dataclass(frozen=True)
class Cocharacter:
    """ λ(t) = diag(t^k_i); slopes are k_i / denominator, constant on blocks. """

    exponents: Tuple[int, ...]
    denominator: int = 1
    ranks: Optional[Tuple[int, ...]] = None

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(k, self.denominator) for k in self.exponents)

    @property
    def blocks(self) -> Tuple[int, ...]:
        return self.ranks if self.ranks is not None else (len(self.exponents),)


def trivial_cocharacter(d: int) -> Cocharacter:
    return Cocharacter((0,) * d, 1, (d,))


def group_membership(g: Matrix, D: GroupDescriptor) -> Report:
    report = Report(f'membership {D.to_label()}')
    ring = g.ring
    N = ring.field.N
    if g.dim != D.d:
        report.add(Check('size', Status.FAIL, detail=f'{g.dim}x{g.dim} matrix for {D.to_label()}'))
        return report

    determinant = g.det()
    report.add(boolean_check('invertible', not determinant.vanishes(), 'determinant vanishes at precision',
                             N, determinant.window_loss))
    if D.kind in (SL, SO):
        report.add(residual_check('det_one', determinant - ring.one(), N))
    if D.kind == SP:
        J = D.form_matrix(ring)
        report.add(residual_check('symplectic', g.transpose() @ J @ g - J, N))
    if D.kind == SO:
        S = D.form_matrix(ring)
        report.add(residual_check('orthogonal', g.transpose() @ S @ g - S, N))

    return report


def lie_membership(X: Matrix, D: GroupDescriptor) -> Report:
    report = Report(f'lie {D.to_label()}')
    ring = X.ring
    N = ring.field.N
    if X.dim != D.d:
        report.add(Check('size', Status.FAIL, detail=f'{X.dim}x{X.dim} matrix for {D.to_label()}'))
        return report

    if D.kind == GL:
        report.add(Check('gl', Status.PASS, N))
    if D.kind == SL:
        report.add(residual_check('trace_zero', X.trace(), N))
    if D.kind == SP:
        J = D.form_matrix(ring)
        report.add(residual_check('symplectic_lie', X.transpose() @ J + J @ X, N))
    if D.kind == SO:
        S = D.form_matrix(ring)
        report.add(residual_check('orthogonal_lie', X.transpose() @ S + S @ X, N))

    return report


def dlog(g: Matrix) -> Matrix:
    """ ∂(g) g^-1. """

    return g.derive() @ g.inverse()


def adjoint(g: Matrix, X: Matrix) -> Matrix:
    return g @ X @ g.inverse()


def gauge(x: Matrix, X: Matrix) -> Matrix:
    """ Γ_x(X) = x X x^-1 - ∂(x) x^-1. """

    x_inv = x.inverse()
    return x @ X @ x_inv - x.derive() @ x_inv


def pair_residual(g: Matrix, X: Matrix, frob_power: int = 1) -> Matrix:
    """ X g + ∂(g) - μ g φ(X), which vanishes iff X = Γ_g(μ φ(X)). """

    mu = mu_factor(g.ring, frob_power)
    return X @ g + g.derive() - (g @ X.frobenius(frob_power)).scale(mu)


def bphinabla_check(P: GPair) -> Report:
    report = Report(f'pair {P.group.to_label()}')
    report.extend(group_membership(P.g, P.group), 'group_')
    report.extend(lie_membership(P.X, P.group), 'lie_')
    report.add(residual_check('pair_identity', pair_residual(P.g, P.X, P.frob_power), P.ring.field.N,
                              f'frobenius power {P.frob_power}'))
    return report


def morphism_apply(x: Matrix, P: GPair, verify: bool = True, check_membership: bool = True) -> GPair:
    """ (g, X) -> (x g φ(x^-1), Γ_x(X)). """

    if check_membership:
        membership = group_membership(x, P.group)
        if membership.status is Status.FAIL:
            raise MembershipError(f'morphism is not in {P.group.to_label()}')

    x_inv = x.inverse()
    g = x @ P.g @ x_inv.frobenius(P.frob_power)
    X = x @ P.X @ x_inv - x.derive() @ x_inv
    moved = GPair(P.group, g, X, P.frob_power)
    if verify:
        report = bphinabla_check(moved)
        if report.status is Status.FAIL:
            failed = [c.name for c in report.checks if c.status is Status.FAIL]
            raise GaugeIncompatible(f'transported pair fails {failed}')

    return moved


def pushforward_pair(P: GPair, n: int) -> Tuple[GPair, Check]:
    """ ([n]_*(g), X) as a φ^n pair, with X + dlog([n]_*g) = μ(φ^n) Ad([n]_*g)(φ^n X) checked. """

    g = frobenius_product(P.g, n, P.frob_power)
    pushed = GPair(P.group, g, P.X, P.frob_power * n)
    check = residual_check('pushforward_identity', pair_residual(g, P.X, pushed.frob_power), P.ring.field.N,
                           f'frobenius power {pushed.frob_power}')
    return pushed, check


def cocharacter_from_certificate(C: SlopeCertificate) -> Cocharacter:
    C.validate(C.U.dim)
    d = lcm_denominator([C.jumps])
    exponents = []
    for block in C.blocks:
        k = block.slope * d
        if k.denominator != 1:
            raise MalformedCertificate(f'slope {block.slope} not integral after scaling by {d}')
        exponents.extend([int(k)] * block.rank)

    return Cocharacter(tuple(exponents), d, C.ranks)


# conjugation by λ(t)^sign scales entry (i, j) by t^e with e = sign * (k_i - k_j)
PATTERN_RULES = {
    'P': lambda e: e >= 0,
    'U': lambda e: e > 0,
    'Z': lambda e: e == 0,
}


@dataclass(frozen=True)
class ParabolicPatterns:
    P: FrozenSet[Tuple[int, int]]
    U: FrozenSet[Tuple[int, int]]
    Z: FrozenSet[Tuple[int, int]]


def parabolic_patterns(cochar: Cocharacter, sign: int = -1) -> ParabolicPatterns:
    if sign not in (1, -1):
        raise ValueError('sign must be +1 or -1')

    k = cochar.exponents
    d = len(k)
    found: Dict[str, FrozenSet[Tuple[int, int]]] = {}
    for name, rule in PATTERN_RULES.items():
        found[name] = frozenset((i, j) for i in range(d) for j in range(d) if rule(sign * (k[i] - k[j])))

    return ParabolicPatterns(**found)


def _outside(M: Matrix, pattern: FrozenSet[Tuple[int, int]]) -> List:
    return [x for i, j, x in M.positions() if (i, j) not in pattern]


def pattern_check(name: str, M: Matrix, pattern: FrozenSet[Tuple[int, int]]) -> Check:
    return residual_check(name, _outside(M, pattern), M.ring.field.N)


def lieU_conjugation_probe(Zm: Matrix, u: Matrix, cochar: Cocharacter, sign: int = -1) -> Check:
    """ Z - Ad(u)(Z) lies in Lie(U) for Z in Lie(Z(λ)) and u in U(λ). """

    patterns = parabolic_patterns(cochar, sign)
    if not pattern_check('z', Zm, patterns.Z).status.holds:
        raise PatternViolation('Z is not block diagonal for the cocharacter')

    if not pattern_check('u', u - Matrix.identity(u.ring, u.dim), patterns.U).status.holds:
        raise PatternViolation('u is not unipotent in U(λ)')

    return pattern_check('lieU_conjugation', Zm - adjoint(u, Zm), patterns.U)


@dataclass(frozen=True)
class BlockReduction:
    z: Matrix
    X0: Matrix
    cocharacter: Cocharacter
    report: Report = field(compare=False)


def block_reduce(P: GPair, C: SlopeCertificate) -> BlockReduction:
    """
    Moves (g, X) into the basis of the certificate, requires both to lie in Lie(P(-λ)) / P(-λ), and keeps the
    block diagonal parts z, X0, which again satisfy X0 = Γ_z(μ φ(X0)).
    """

    C.validate(P.dim)
    cochar = cocharacter_from_certificate(C)
    patterns = parabolic_patterns(cochar, -1)
    moved = morphism_apply(C.U.inverse(), P, verify=False, check_membership=False)

    report = Report('block-reduction')
    for name, M in (('parabolic_g', moved.g), ('parabolic_X', moved.X)):
        check = pattern_check(name, M, patterns.P)
        if check.status is Status.FAIL:
            raise PatternViolation(f'{name}: {check.detail}')
        report.add(check)

    z = moved.g.block_diagonal(C.ranks)
    X0 = moved.X.block_diagonal(C.ranks)
    # a block over several slopes is not pure of its claimed one
    for A, block in zip(z.diagonal_blocks(C.ranks), C.blocks):
        for check in verify_block(A, P.frob_power, block.rank, block.slope):
            if check.status is Status.FAIL:
                raise PatternViolation(f'{check.name}: {check.detail}')
            report.add(check)

    report.add(residual_check('reduced_identity', pair_residual(z, X0, P.frob_power), P.ring.field.N))
    Log.debug('gstruct', f'block reduction over blocks {C.ranks}: {report.status.value}')
    return BlockReduction(z, X0, cochar, report)


def unit_root_reduce(z: Matrix, X0: Matrix, cochar: Cocharacter, frob_power: int = 1) -> Report:
    """ λ(π^-1)[d]_*(z) must be unit-root and still compatible with X0 as a φ^d pair. """

    d = cochar.denominator
    power = frob_power * d
    w = pi_diagonal(z.ring, [-k for k in cochar.exponents]) @ frobenius_product(z, d, frob_power)

    report = Report('unit-root-reduction')
    report.extend(unit_root_check(PhiModule(w, power)))
    report.add(residual_check('reduced_compatibility', pair_residual(w, X0, power), z.ring.field.N,
                              f'frobenius power {power}'))
    return report


def cocharacter_in_group(cochar: Cocharacter, D: GroupDescriptor, ring: RingContext) -> Report:
    """ Whether λ(π) = diag(π^k_i) lies in G(K); recorded as an experiment, never enforced. """

    report = Report(f'cocharacter-in-{D.to_label()}')
    return report.extend(group_membership(pi_diagonal(ring, cochar.exponents), D))


@dataclass(frozen=True)
class MonodromyResult:
    report: Report = field(compare=False)
    g: Optional[Matrix] = None
    X: Optional[Matrix] = None
    transformed: Optional[Report] = field(default=None, compare=False)

    @property
    def status(self) -> Status:
        return self.report.status


def monodromy_certificate_check(P: GPair, cochar: Cocharacter, b: Matrix, ext: ExtensionContext) -> MonodromyResult:
    """
    Over R_L, Γ_b(X) must lie in Lie(U(-λ)): strictly block upper with vanishing diagonal blocks. The verdict
    only depends on b ∈ G(R_L) and that support test; the transformed pair is reported separately.
    """

    if b.ring != ext.inner:
        raise MembershipError('witness does not live over the extension ring')

    X = P.X.pullback(ext)
    g = P.g.pullback(ext)
    report = Report('monodromy')
    report.extend(group_membership(b, P.group), 'witness_')

    if report.status is Status.FAIL:
        return MonodromyResult(report)

    b_inv = b.inverse()
    Y = b @ X @ b_inv - b.derive() @ b_inv
    patterns = parabolic_patterns(cochar, -1)
    report.add(pattern_check('unipotent_support', Y, patterns.U))

    g_b = b @ g @ b_inv.frobenius(P.frob_power)
    transformed = bphinabla_check(GPair(P.group, g_b, Y, P.frob_power))
    Log.debug('gstruct', f'monodromy m={ext.kummer_m}: {report.status.value}')
    return MonodromyResult(report, g_b, Y, transformed)


def pair_from_module(M: Module, group: Optional[GroupDescriptor] = None) -> GPair:
    """ (A, N) of a (φ,∇)-module seen as a GL pair, or as a pair of the given group. """

    group = group or make_group(GL, M.dim)
    return GPair(group, M.A, connection_matrix(M), M.frob_power)


def module_from_pair(P: GPair, checked: bool = True) -> Module:
    return build_module(P.g, P.X, P.frob_power, checked)
