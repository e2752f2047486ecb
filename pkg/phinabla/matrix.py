"""
Square and rectangular matrices over a truncated Robba ring.

Determinants use Laplace expansion over row subsets, inverses the adjugate divided by the inverted determinant,
so nothing but ring operations and one `invert` is needed.
"""

import itertools
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from .coeffring import ScalarLike, _min_prec
from .exceptions import ContextMismatch, NotInvertibleAtPrecision, RankError
from .robba import ExtensionContext, RingContext, RobbaElement, pullback


class Matrix:
    __slots__ = ('ring', 'rows')

    def __init__(self, ring: RingContext, rows: Sequence[Sequence[RobbaElement]]):
        self.ring = ring
        self.rows: Tuple[Tuple[RobbaElement, ...], ...] = tuple(tuple(row) for row in rows)
        width = len(self.rows[0]) if self.rows else 0
        if any(len(row) != width for row in self.rows):
            raise RankError('ragged matrix')

    @classmethod
    def zeros(cls, ring: RingContext, n: int, m: Optional[int] = None) -> 'Matrix':
        m = n if m is None else m
        zero = ring.zero()
        return cls(ring, [[zero] * m for _ in range(n)])

    @classmethod
    def identity(cls, ring: RingContext, n: int) -> 'Matrix':
        return cls.diagonal(ring, [ring.one()] * n)

    @classmethod
    def diagonal(cls, ring: RingContext, entries: Sequence[RobbaElement]) -> 'Matrix':
        zero = ring.zero()
        n = len(entries)
        return cls(ring, [[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, ring: RingContext, values: Sequence[Sequence[ScalarLike]]) -> 'Matrix':
        return cls(ring, [[ring.constant(v) for v in row] for row in values])

    @classmethod
    def direct_sum(cls, *blocks: 'Matrix') -> 'Matrix':
        ring = blocks[0].ring
        n = sum(b.nrows for b in blocks)
        rows = [list(r) for r in cls.zeros(ring, n).rows]
        offset = 0
        for block in blocks:
            block._check_ring(ring)
            for i in range(block.nrows):
                for j in range(block.ncols):
                    rows[offset + i][offset + j] = block.rows[i][j]
            offset += block.nrows

        return cls(ring, rows)

    def _check_ring(self, ring: RingContext):
        if self.ring is not ring and self.ring != ring:
            raise ContextMismatch('matrices over different rings')

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def dim(self) -> int:
        if self.nrows != self.ncols:
            raise RankError(f'{self.nrows}x{self.ncols} matrix is not square')

        return self.nrows

    def __getitem__(self, index: Tuple[int, int]) -> RobbaElement:
        i, j = index
        return self.rows[i][j]

    def entries(self) -> Iterator[RobbaElement]:
        for row in self.rows:
            yield from row

    def positions(self) -> Iterator[Tuple[int, int, RobbaElement]]:
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                yield i, j, x

    @property
    def window_loss(self) -> bool:
        return any(x.window_loss for x in self.entries())

    @property
    def prec(self) -> Optional[int]:
        prec = None
        for x in self.entries():
            prec = _min_prec(prec, x.prec)

        return prec

    def map(self, fn: Callable[[RobbaElement], RobbaElement], ring: Optional[RingContext] = None) -> 'Matrix':
        return Matrix(ring or self.ring, [[fn(x) for x in row] for row in self.rows])

    def __add__(self, other: 'Matrix') -> 'Matrix':
        self._same_shape(other)
        return Matrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: 'Matrix') -> 'Matrix':
        self._same_shape(other)
        return Matrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> 'Matrix':
        return self.map(lambda x: -x)

    def __matmul__(self, other: 'Matrix') -> 'Matrix':
        other._check_ring(self.ring)
        if self.ncols != other.nrows:
            raise RankError(f'cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}')

        columns = list(zip(*other.rows))
        zero = self.ring.zero()
        rows = []
        for row in self.rows:
            out = []
            for column in columns:
                total = zero
                for a, b in zip(row, column):
                    if a.terms and b.terms:
                        total = total + a * b
                    elif a.window_loss or b.window_loss or a.prec is not None or b.prec is not None:
                        total = total + a * b
                out.append(total)
            rows.append(out)

        return Matrix(self.ring, rows)

    def scale(self, c) -> 'Matrix':
        """ Multiplies every entry by a ring element or a scalar. """

        if isinstance(c, RobbaElement):
            return self.map(lambda x: c * x)

        return self.map(lambda x: x.scale(c))

    def _same_shape(self, other: 'Matrix'):
        other._check_ring(self.ring)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise RankError('matrix shapes differ')

    def derive(self) -> 'Matrix':
        return self.map(lambda x: x.derive())

    def frobenius(self, n: int = 1) -> 'Matrix':
        return self.map(lambda x: x.frobenius(n))

    def transpose(self) -> 'Matrix':
        return Matrix(self.ring, list(zip(*self.rows)))

    def trace(self) -> RobbaElement:
        total = self.ring.zero()
        for i in range(self.dim):
            total = total + self.rows[i][i]

        return total

    def kron(self, other: 'Matrix') -> 'Matrix':
        other._check_ring(self.ring)
        rows = []
        for a_row in self.rows:
            for b_row in other.rows:
                rows.append([a * b for a in a_row for b in b_row])

        return Matrix(self.ring, rows)

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> 'Matrix':
        return Matrix(self.ring, [[self.rows[i][j] for j in col_indices] for i in row_indices])

    def block(self, rows: Tuple[int, int], cols: Tuple[int, int]) -> 'Matrix':
        return self.submatrix(range(*rows), range(*cols))

    def permute(self, order: Sequence[int]) -> 'Matrix':
        """ P^-1 M P for the permutation matrix P sending e_k to e_order[k]. """

        return self.submatrix(order, order)

    def det(self) -> RobbaElement:
        n = self.dim
        if n == 0:
            return self.ring.one()

        # partial[mask]: signed sum over injections of the first popcount(mask) columns into the rows in mask
        partial = {0: self.ring.one()}
        for column in range(n):
            step = {}
            for mask, value in partial.items():
                for row in range(n):
                    bit = 1 << row
                    if mask & bit:
                        continue
                    entry = self.rows[row][column]
                    if not entry.terms and not entry.window_loss:
                        continue
                    term = value * entry
                    if bin(mask >> row).count('1') % 2:
                        term = -term
                    target = mask | bit
                    step[target] = step[target] + term if target in step else term
            partial = step
            if not partial:
                return self.ring.zero()

        return partial.get((1 << n) - 1, self.ring.zero())

    def minor(self, i: int, j: int) -> RobbaElement:
        n = self.dim
        return self.submatrix([r for r in range(n) if r != i], [c for c in range(n) if c != j]).det()

    def adjugate(self) -> 'Matrix':
        n = self.dim
        if n == 1:
            return Matrix.identity(self.ring, 1)

        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                cofactor = self.minor(j, i)
                row.append(-cofactor if (i + j) % 2 else cofactor)
            rows.append(row)

        return Matrix(self.ring, rows)

    def inverse(self) -> 'Matrix':
        determinant = self.det()
        if determinant.vanishes():
            raise NotInvertibleAtPrecision('determinant vanishes at precision')

        return self.adjugate().scale(determinant.invert())

    def compound(self, k: int) -> 'Matrix':
        """ k-th compound matrix: k x k minors indexed by sorted row and column subsets. """

        n = self.dim
        if not 0 <= k <= n:
            raise RankError(f'exterior power {k} of a rank {n} matrix')

        subsets = list(itertools.combinations(range(n), k))
        return Matrix(self.ring, [[self.submatrix(r, c).det() for c in subsets] for r in subsets])

    def block_diagonal(self, sizes: Sequence[int]) -> 'Matrix':
        """ Keeps the diagonal blocks of the given sizes, zeroing everything else. """

        rows = [list(r) for r in Matrix.zeros(self.ring, self.dim).rows]
        offset = 0
        for size in sizes:
            for i in range(offset, offset + size):
                for j in range(offset, offset + size):
                    rows[i][j] = self.rows[i][j]
            offset += size

        return Matrix(self.ring, rows)

    def diagonal_blocks(self, sizes: Sequence[int]) -> List['Matrix']:
        blocks = []
        offset = 0
        for size in sizes:
            blocks.append(self.block((offset, offset + size), (offset, offset + size)))
            offset += size

        return blocks

    def pullback(self, ext: ExtensionContext) -> 'Matrix':
        return self.map(lambda x: pullback(x, ext), ring=ext.inner)

    def with_ring(self, ring: RingContext) -> 'Matrix':
        return self.map(lambda x: x.with_ring(ring), ring=ring)

    def vanishes(self, prec: Optional[int] = None) -> bool:
        return all(x.vanishes(prec) for x in self.entries())

    def equals_at(self, other: 'Matrix', prec: Optional[int] = None) -> bool:
        return (self - other).vanishes(prec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented

        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f'Matrix({self.nrows}x{self.ncols})'


def pi_diagonal(ring: RingContext, exponents: Sequence[int]) -> Matrix:
    """ diag(π^k_1, ..., π^k_d). """

    field = ring.field
    return Matrix.diagonal(ring, [ring.constant(field.pi_power(k)) for k in exponents])


def column(ring: RingContext, entries: Sequence[RobbaElement]) -> Matrix:
    return Matrix(ring, [[x] for x in entries])
