"""
φ-modules and (φ,∇)-modules given by matrices (A, N) in a fixed basis, with Φ(e_j) = Σ_i A_ij e_i and
∇_{d/dt}(e_j) = Σ_i N_ij e_i. A module may be a φ^k-module (`frob_power = k`) after pushforward.

Compatibility of Frobenius and connection reads μ_k A φ^k(N) = ∂(A) + N A with μ_k = μ(φ^k, t).
Slopes are never computed from scratch; they are verified from a SlopeCertificate.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .exceptions import (ContextMismatch, GaugeIncompatible, MalformedCertificate, NotInvertibleAtPrecision,
                         RankError, SlopeError, UnboundedDeterminant, UnsupportedFrobeniusLift, WindowInconclusive)
from .logger import Log
from .matrix import Matrix, column
from .report import Check, Report, boolean_check, residual_check
from .robba import RingContext, RobbaElement, mu_factor
from .status import Status


@dataclass(frozen=True)
class PhiModule:
    A: Matrix
    frob_power: int = 1

    def __post_init__(self):
        if self.frob_power < 1:
            raise ValueError('Frobenius power must be positive')

        if self.A.dim == 0:
            raise RankError('rank 0 module')

        if self.A.det().vanishes():
            raise NotInvertibleAtPrecision('Frobenius matrix has vanishing determinant')

    @property
    def ring(self) -> RingContext:
        return self.A.ring

    @property
    def dim(self) -> int:
        return self.A.dim


@dataclass(frozen=True)
class PhiNablaModule:
    base: PhiModule
    N: Matrix
    checked: bool = True

    def __post_init__(self):
        if self.N.dim != self.base.dim:
            raise RankError('connection and Frobenius matrices have different sizes')

        self.N._check_ring(self.base.ring)
        if self.checked:
            report = gauge_compat_check(self)
            if report.status is Status.FAIL:
                raise GaugeIncompatible(f'gauge compatibility fails: {report.checks[0].detail}')
            if report.status is not Status.PASS:
                Log.warning('phimod', f'gauge compatibility only {report.status.value}')

    @property
    def A(self) -> Matrix:
        return self.base.A

    @property
    def ring(self) -> RingContext:
        return self.base.ring

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def frob_power(self) -> int:
        return self.base.frob_power


Module = Union[PhiModule, PhiNablaModule]


def build_module(A: Matrix, N: Optional[Matrix] = None, frob_power: int = 1, checked: bool = True) -> Module:
    base = PhiModule(A, frob_power)
    if N is None:
        return base

    return PhiNablaModule(base, N, checked)


def connection_matrix(M: Module) -> Matrix:
    """ N of a (φ,∇)-module; the zero matrix for a bare φ-module. """

    if isinstance(M, PhiNablaModule):
        return M.N

    return Matrix.zeros(M.ring, M.dim)


def phi_part(M: Module) -> PhiModule:
    return M.base if isinstance(M, PhiNablaModule) else M


def _rebuild(M: Module, A: Matrix, N: Optional[Matrix], frob_power: int, checked: Optional[bool] = None) -> Module:
    if isinstance(M, PhiNablaModule) and N is not None:
        return build_module(A, N, frob_power, M.checked if checked is None else checked)

    return PhiModule(A, frob_power)


def gauge_residual(A: Matrix, N: Matrix, frob_power: int = 1) -> Matrix:
    """ μ_k A φ^k(N) - ∂(A) - N A. """

    mu = mu_factor(A.ring, frob_power)
    return (A @ N.frobenius(frob_power)).scale(mu) - A.derive() - N @ A


def operator_form_check(M: Module, shifts: Sequence[int] = (0, 1, -1)) -> Check:
    """ Tests Θ(Φ(v)) = μ Φ(Θ(v)) on the vectors t^s e_j. """

    A = M.A
    N = connection_matrix(M)
    ring = M.ring
    k = M.frob_power
    mu = mu_factor(ring, k)

    def frobenius_op(v: Matrix) -> Matrix:
        return A @ v.frobenius(k)

    def connection_op(v: Matrix) -> Matrix:
        return v.derive() + N @ v

    entries: List[RobbaElement] = []
    zero = ring.zero()
    for j in range(M.dim):
        for s in shifts:
            v = column(ring, [ring.monomial(s) if i == j else zero for i in range(M.dim)])
            difference = connection_op(frobenius_op(v)) - frobenius_op(connection_op(v)).scale(mu)
            entries.extend(difference.entries())

    return residual_check('gauge_operator_form', entries, ring.field.N)


def gauge_compat_check(M: Module) -> Report:
    """ Matrix form μAφ(N) = ∂(A) + NA, cross-checked on basis vectors in operator form. """

    N = connection_matrix(M)
    report = Report('gauge-compatibility')
    report.add(residual_check('gauge_matrix_form', gauge_residual(M.A, N, M.frob_power), M.ring.field.N,
                              f'frobenius power {M.frob_power}'))
    report.add(operator_form_check(M))
    return report


def _same_context(M1: Module, M2: Module):
    M1.A._check_ring(M2.ring)
    if M1.frob_power != M2.frob_power:
        raise ContextMismatch('modules over different Frobenius powers')


def tensor(M1: Module, M2: Module) -> Module:
    _same_context(M1, M2)
    A = M1.A.kron(M2.A)
    if isinstance(M1, PhiNablaModule) and isinstance(M2, PhiNablaModule):
        ring = M1.ring
        N = M1.N.kron(Matrix.identity(ring, M2.dim)) + Matrix.identity(ring, M1.dim).kron(M2.N)
        return build_module(A, N, M1.frob_power, M1.checked and M2.checked)

    return PhiModule(A, M1.frob_power)


def dual(M: Module) -> Module:
    """ A -> (A^-1)^T, N -> -N^T: the evaluation pairing is then a morphism to the trivial module. """

    A = M.A.inverse().transpose()
    N = (-M.N).transpose() if isinstance(M, PhiNablaModule) else None
    return _rebuild(M, A, N, M.frob_power)


def _wedge_connection(N: Matrix, k: int) -> Matrix:
    """ Derivation induced on Λ^k: Θ(e_J) = Σ_s e_j1 ∧ .. Θ(e_js) .. ∧ e_jk in the sorted wedge basis. """

    n = N.dim
    subsets = list(itertools.combinations(range(n), k))
    index = {s: i for i, s in enumerate(subsets)}
    ring = N.ring
    rows = [[ring.zero() for _ in subsets] for _ in subsets]
    for col, J in enumerate(subsets):
        for position, j in enumerate(J):
            for i in range(n):
                entry = N[i, j]
                if entry.is_zero:
                    continue
                replaced = list(J)
                replaced[position] = i
                if len(set(replaced)) < k:
                    continue
                inversions = sum(1 for a, b in itertools.combinations(replaced, 2) if a > b)
                row = index[tuple(sorted(replaced))]
                rows[row][col] = rows[row][col] + (-entry if inversions % 2 else entry)

    return Matrix(ring, rows)


def exterior_power(M: Module, k: int) -> Module:
    if not 1 <= k <= M.dim:
        raise RankError(f'exterior power {k} of a rank {M.dim} module')

    A = M.A.compound(k)
    N = _wedge_connection(M.N, k) if isinstance(M, PhiNablaModule) else None
    return _rebuild(M, A, N, M.frob_power)


def direct_sum(M1: Module, M2: Module) -> Module:
    _same_context(M1, M2)
    A = Matrix.direct_sum(M1.A, M2.A)
    if isinstance(M1, PhiNablaModule) and isinstance(M2, PhiNablaModule):
        return build_module(A, Matrix.direct_sum(M1.N, M2.N), M1.frob_power, M1.checked and M2.checked)

    return PhiModule(A, M1.frob_power)


def frobenius_product(A: Matrix, n: int, frob_power: int = 1) -> Matrix:
    """ [n]_*(A) = A φ^k(A) φ^2k(A) ... φ^(n-1)k(A) for the k-th Frobenius power. """

    if n < 1:
        raise ValueError('pushforward needs n >= 1')

    total = A
    for i in range(1, n):
        total = total @ A.frobenius(frob_power * i)

    return total


def pushforward(M: Module, n: int) -> Module:
    """ Restriction along φ^n; the connection is unchanged and compatibility holds with μ(φ^n, t). """

    A = frobenius_product(M.A, n, M.frob_power)
    N = M.N if isinstance(M, PhiNablaModule) else None
    return _rebuild(M, A, N, M.frob_power * n)


def twist(M: Module, s: int) -> Module:
    A = M.A.scale(M.ring.field.pi_power(s))
    N = M.N if isinstance(M, PhiNablaModule) else None
    return _rebuild(M, A, N, M.frob_power)


def base_change(M: Module, U: Matrix, checked: Optional[bool] = None) -> Module:
    """ A -> U^-1 A φ(U), N -> U^-1 N U + U^-1 ∂(U) (the gauge transform by U^-1). """

    U_inv = U.inverse()
    A = U_inv @ M.A @ U.frobenius(M.frob_power)
    N = None
    if isinstance(M, PhiNablaModule):
        N = U_inv @ M.N @ U + U_inv @ U.derive()

    return _rebuild(M, A, N, M.frob_power, checked)


def det_valuation(M: Module) -> Fraction:
    """ 1-Gauss valuation of det A, invariant under change of basis. """

    determinant = M.A.det()
    if determinant.window_loss:
        raise WindowInconclusive('determinant lost terms outside the window')

    if determinant.vanishes():
        raise UnboundedDeterminant('determinant vanishes at precision')

    return Fraction(determinant.gauss_valuation(0))


def unit_root_check(M: Module) -> Report:
    """ Entries of A integral and ν(det A) = 0, so A lies in GL_d of the bounded integral subring. """

    report = Report('unit-root')
    A = M.A
    negative = [(i, j) for i, j, x in A.positions() if x.gauss_valuation(0) < 0]
    report.add(boolean_check('entries_integral', not negative,
                             f'non-integral entries at {negative}' if negative else '',
                             A.ring.field.N, A.window_loss))
    try:
        valuation = det_valuation(M)
    except WindowInconclusive as error:
        report.add(Check('det_valuation_zero', Status.INCONCLUSIVE, A.ring.field.N, True, str(error)))
    except UnboundedDeterminant as error:
        report.add(Check('det_valuation_zero', Status.FAIL, A.ring.field.N, A.window_loss, str(error)))
    else:
        report.add(boolean_check('det_valuation_zero', valuation == 0, f'det valuation {valuation}',
                                 A.ring.field.N, A.window_loss))

    return report


def _check_slope(s: int, r: int):
    if r < 1 or math.gcd(s, r) != 1:
        raise SlopeError(f'slope {s}/{r} is not in lowest terms with positive denominator')


def _pushforward_twist_unit_root(M: Module, s: int, r: int) -> Report:
    return unit_root_check(twist(pushforward(phi_part(M), r), -s))


def purity_check(M: Module, s: int, r: int) -> Report:
    """ ([r]_*M)(-s) unit-root in the given basis certifies purity of slope s/r. """

    _check_slope(s, r)
    report = Report(f'purity {s}/{r}')
    return report.extend(_pushforward_twist_unit_root(M, s, r))


@dataclass(frozen=True)
class CertificateBlock:
    rank: int
    slope: Fraction


@dataclass(frozen=True)
class SlopeCertificate:
    """ Adapted basis U (columns) and the HN blocks, slopes increasing along the basis. """

    U: Matrix
    blocks: Tuple[CertificateBlock, ...]

    @property
    def jumps(self) -> Tuple[Fraction, ...]:
        return tuple(block.slope for block in self.blocks)

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(block.rank for block in self.blocks)

    def validate(self, dim: int):
        if not self.blocks:
            raise MalformedCertificate('certificate has no blocks')

        if any(block.rank < 1 for block in self.blocks):
            raise MalformedCertificate('block ranks must be positive')

        if sum(self.ranks) != dim:
            raise MalformedCertificate(f'block ranks {self.ranks} do not sum to {dim}')

        if self.U.nrows != dim or self.U.ncols != dim:
            raise MalformedCertificate(f'basis matrix is not {dim}x{dim}')


def make_certificate(U: Matrix, blocks: Sequence[Tuple[int, Union[Fraction, int, str]]]) -> SlopeCertificate:
    return SlopeCertificate(U, tuple(CertificateBlock(int(r), Fraction(s)) for r, s in blocks))


def _below_block_entries(M: Matrix, ranks: Sequence[int]) -> List[RobbaElement]:
    owner = [b for b, size in enumerate(ranks) for _ in range(size)]
    return [x for i, j, x in M.positions() if owner[i] > owner[j]]


def verify_block(A: Matrix, frob_power: int, rank: int, slope: Fraction) -> List[Check]:
    """ Purity and determinant-valuation checks for one diagonal block of claimed rank and slope. """

    s, r = slope.numerator, slope.denominator
    name = f'block_{slope}'
    try:
        block = PhiModule(A, frob_power)
    except NotInvertibleAtPrecision as error:
        return [Check(f'{name}_pure', Status.FAIL, detail=str(error))]

    checks = []
    if rank % r:
        checks.append(Check(f'{name}_pure', Status.FAIL, detail=f'rank {rank} not divisible by {r}'))
    else:
        # pure of slope s/r iff ([kr]_*)(-ks) is unit-root for some k
        outcome = None
        for k in range(1, rank // r + 1):
            outcome = _pushforward_twist_unit_root(block, k * s, k * r)
            if outcome.holds:
                break
        checks.append(Check(f'{name}_pure', outcome.status, block.ring.field.N, block.A.window_loss,
                            f'([{k * r}]_*B)({-k * s}) unit-root check'))

    try:
        valuation = det_valuation(block)
    except (WindowInconclusive, UnboundedDeterminant) as error:
        checks.append(Check(f'{name}_det_valuation', Status.INCONCLUSIVE, detail=str(error)))
    else:
        checks.append(boolean_check(f'{name}_det_valuation', valuation == rank * slope,
                                    f'ν(det) = {valuation}, rank*slope = {rank * slope}'))

    return checks


def verify_slope_certificate(M: Module, C: SlopeCertificate, jobs: int = 1) -> Report:
    """
    Passes iff, in the basis C.U, A and N are block upper triangular, every diagonal block is pure of its
    claimed slope, and the claimed jumps strictly increase.
    """

    C.validate(M.dim)
    report = Report('slope-certificate')
    moved = base_change(M, C.U, checked=False)
    N_prec = M.ring.field.N

    report.add(residual_check('block_upper_A', _below_block_entries(moved.A, C.ranks), N_prec))
    if isinstance(moved, PhiNablaModule):
        report.add(residual_check('block_upper_N', _below_block_entries(moved.N, C.ranks), N_prec))

    blocks = moved.A.diagonal_blocks(C.ranks)
    arguments = [(A, M.frob_power, block.rank, block.slope) for A, block in zip(blocks, C.blocks)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(lambda args: verify_block(*args), arguments))
    else:
        results = [verify_block(*args) for args in arguments]

    for checks in results:
        for check in checks:
            report.add(check)

    jumps = C.jumps
    increasing = all(a < b for a, b in zip(jumps, jumps[1:]))
    report.add(boolean_check('jumps_increasing', increasing, f'jumps {[str(j) for j in jumps]}'))
    Log.debug('Certificate', f'{len(C.blocks)} blocks verified: {report.status.value}')
    return report


def pushforward_certificate(C: SlopeCertificate, n: int) -> SlopeCertificate:
    """ Certificate of [n]_*M: same basis, slopes multiplied by n. """

    return SlopeCertificate(C.U, tuple(CertificateBlock(b.rank, b.slope * n) for b in C.blocks))


def twist_certificate(C: SlopeCertificate, s: int) -> SlopeCertificate:
    return SlopeCertificate(C.U, tuple(CertificateBlock(b.rank, b.slope + s) for b in C.blocks))


def dual_certificate(C: SlopeCertificate) -> SlopeCertificate:
    """ Certificate of the dual: basis U^-T with reversed order, blocks reversed, slopes negated. """

    d = C.U.dim
    reversed_basis = C.U.inverse().transpose().submatrix(range(d), list(reversed(range(d))))
    blocks = tuple(CertificateBlock(b.rank, -b.slope) for b in reversed(C.blocks))
    return SlopeCertificate(reversed_basis, blocks)


def slope_sort_order(labels: Sequence[Fraction]) -> List[int]:
    """ Stable ordering of basis vectors by slope label. """

    return sorted(range(len(labels)), key=lambda i: labels[i])


def tensor_certificate(C1: SlopeCertificate, C2: SlopeCertificate) -> SlopeCertificate:
    """ Certificate of M1 ⊗ M2: basis U1 ⊗ U2 sorted by slope sums; jumps {μ_i + ν_j}. """

    labels1 = [b.slope for b in C1.blocks for _ in range(b.rank)]
    labels2 = [b.slope for b in C2.blocks for _ in range(b.rank)]
    labels = [a + b for a in labels1 for b in labels2]
    order = slope_sort_order(labels)
    U = C1.U.kron(C2.U)
    U = U.submatrix(range(U.nrows), order)

    blocks: List[CertificateBlock] = []
    for slope, group in itertools.groupby(labels[i] for i in order):
        blocks.append(CertificateBlock(sum(1 for _ in group), slope))

    return SlopeCertificate(U, tuple(blocks))


def newton_polygon(C: SlopeCertificate) -> List[Tuple[int, Fraction]]:
    """ Cumulative (Σ r_i, Σ r_i μ_i) starting at the origin. """

    points = [(0, Fraction(0))]
    for block in C.blocks:
        x, y = points[-1]
        points.append((x + block.rank, y + block.rank * block.slope))

    return points


def polygon_tsv(points: Sequence[Tuple[int, Fraction]]) -> str:
    return ''.join(f'{x}\t{y}\n' for x, y in points)


def polygon_svg(points: Sequence[Tuple[int, Fraction]], cell: int = 40, margin: int = 20) -> str:
    """ Static SVG of the polygon over the integer lattice covering its bounding box. """

    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    x_max = max(xs)
    y_min = math.floor(min(ys))
    y_max = math.ceil(max(ys))
    width = x_max * cell + 2 * margin
    height = (y_max - y_min) * cell + 2 * margin

    def sx(x) -> float:
        return margin + float(x) * cell

    def sy(y) -> float:
        return height - margin - float(y - y_min) * cell

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">']
    lines.append('<g stroke="#cccccc" stroke-width="1">')
    for x in range(0, x_max + 1):
        lines.append(f'<line x1="{sx(x):g}" y1="{sy(y_min):g}" x2="{sx(x):g}" y2="{sy(y_max):g}"/>')
    for y in range(y_min, y_max + 1):
        lines.append(f'<line x1="{sx(0):g}" y1="{sy(y):g}" x2="{sx(x_max):g}" y2="{sy(y):g}"/>')
    lines.append('</g>')
    path = ' '.join(f'{sx(x):g},{sy(y):g}' for x, y in points)
    lines.append(f'<polyline points="{path}" fill="none" stroke="#1f4e9c" stroke-width="2"/>')
    for x, y in points:
        lines.append(f'<circle cx="{sx(x):g}" cy="{sy(y):g}" r="3" fill="#1f4e9c"/>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


ONLY_ZERO = 'only-zero'
NONZERO_FOUND = 'nonzero-found'


@dataclass(frozen=True)
class HomProbeResult:
    verdict: str
    witness: Optional[RobbaElement] = None


def rank1_hom_probe(ring: RingContext, a: int, b: int) -> HomProbeResult:
    """
    Solves φ(x) = π^(a-b) x coefficientwise over the window, i.e. looks for morphisms (R, π^a φ) -> (R, π^b φ).
    Exponents split into chains j, qj, q^2 j, ... with q ∤ j; along a chain c_(k-1) = π^e c_k and the bottom
    equation is π^e c_0 = 0. A chain whose only non-zero solutions need its top coefficient, whose image under
    φ leaves the window, is a boundary artefact and makes the probe inconclusive.
    """

    if not ring.default_lift:
        raise UnsupportedFrobeniusLift('the Hom probe is implemented for the lift t -> t^q')

    field = ring.field
    N = field.N
    q = ring.q
    e = a - b
    lo, hi = ring.window

    if (field.one() - field.pi_power(e)).vanishes():
        witness = ring.one()
        residual = witness.frobenius(1) - witness.scale(field.pi_power(e))
        if residual.vanishes() and not residual.window_loss:
            return HomProbeResult(NONZERO_FOUND, witness)

    for j0 in range(lo, hi + 1):
        if j0 == 0 or j0 % q == 0:
            continue
        chain = [j0]
        while lo <= chain[-1] * q <= hi:
            chain.append(chain[-1] * q)
        top = len(chain) - 1
        lowest = N - e * (top + 1)  # least valuation of c_top allowed by the bottom equation
        valuations = [lowest + e * (top - k) for k in range(top + 1)]
        if min(valuations) < N:
            witness = ring.element({j: field.pi_power(v) for j, v in zip(chain, valuations)})
            raise WindowInconclusive(f'boundary solution {witness!r} needs coefficients beyond the window')

    return HomProbeResult(ONLY_ZERO)
