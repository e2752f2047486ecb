import pytest
from hypothesis import given, settings

from phinabla.coeffring import make_field
from phinabla.exceptions import NotInvertibleAtPrecision, RankError
from phinabla.matrix import Matrix, pi_diagonal
from phinabla.robba import make_ring

from .strategies import matrices

Q3 = make_field(3, 1, 8)
R3 = make_ring(Q3, (-32, 32))


def test_determinant_of_constant_matrix():
    assert Matrix.constant(R3, [[1, 2], [3, 4]]).det() == R3.constant(-2)


def test_determinant_of_companion():
    A = Matrix(R3, [[R3.zero(), R3.zero(), R3.constant(3)],
                    [R3.one(), R3.zero(), R3.zero()],
                    [R3.zero(), R3.one(), R3.zero()]])
    assert A.det() == R3.constant(3)


def test_inverse():
    M = Matrix.constant(R3, [[1, 2], [3, 4]])
    assert (M @ M.inverse()).equals_at(Matrix.identity(R3, 2))


def test_inverse_of_laurent_diagonal():
    D = Matrix.diagonal(R3, [R3.monomial(2), R3.monomial(-1)])
    assert D.inverse() == Matrix.diagonal(R3, [R3.monomial(-2), R3.monomial(1)])


def test_singular_matrix():
    with pytest.raises(NotInvertibleAtPrecision):
        Matrix.constant(R3, [[1, 2], [2, 4]]).inverse()


def test_compound_of_two_by_two_is_determinant():
    A = Matrix(R3, [[R3.zero(), R3.constant(3)], [R3.one(), R3.zero()]])
    assert A.compound(2) == Matrix(R3, [[R3.constant(-3)]])
    assert A.compound(1) == A


def test_kron_shape_and_entries():
    A = pi_diagonal(R3, [0, 1])
    B = Matrix.constant(R3, [[1, 2], [0, 1]])
    K = A.kron(B)
    assert (K.nrows, K.ncols) == (4, 4)
    assert K[2, 3] == R3.constant(6)
    assert K[0, 2].is_zero


def test_direct_sum_and_blocks():
    A = Matrix.constant(R3, [[1]])
    B = Matrix.constant(R3, [[1, 2], [3, 4]])
    S = Matrix.direct_sum(A, B)
    assert S.diagonal_blocks([1, 2]) == [A, B]
    assert S.block_diagonal([1, 2]) == S


def test_permute():
    M = pi_diagonal(R3, [0, 1, 2])
    assert M.permute([2, 0, 1]) == pi_diagonal(R3, [2, 0, 1])


def test_ragged_rows_are_rejected():
    with pytest.raises(RankError):
        Matrix(R3, [[R3.one()], [R3.one(), R3.one()]])


def test_non_square_has_no_dimension():
    with pytest.raises(RankError):
        Matrix.zeros(R3, 2, 3).dim


class TestDeterminant:
    @settings(max_examples=40, deadline=None)
    @given(matrices(R3, 3, exponents=(-2, 2), max_terms=2), matrices(R3, 3, exponents=(-2, 2), max_terms=2))
    def test_multiplicative(self, A, B):
        assert (A @ B).det() == A.det() * B.det()

    @settings(max_examples=40, deadline=None)
    @given(matrices(R3, 3, exponents=(-2, 2), max_terms=2))
    def test_transpose(self, A):
        assert A.transpose().det() == A.det()

    @settings(max_examples=40, deadline=None)
    @given(matrices(R3, 3, exponents=(-2, 2), max_terms=2))
    def test_adjugate(self, A):
        assert A @ A.adjugate() == Matrix.diagonal(R3, [A.det()] * 3)
