import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from parallelotope.errors import DimensionError, InvalidInputError, SingularMatrixError
from parallelotope.matrix import (
    Matrix,
    SymMatrix,
    cofactor,
    det_rank1_update,
    determinant,
    dot,
    gram_matrix,
    inverse,
    principal_minor,
    solve,
    spd_solve,
)
from parallelotope.scalar import EXACT, FLOAT, Float64

from oracles import delete, leibniz_det

small_ints = st.integers(-9, 9)


def square(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n))


# gram_matrix

def test_gram_orthonormal():
    assert gram_matrix([(1, 0), (0, 1)]) == Matrix.identity(2)


def test_gram_duplicated_vector():
    assert gram_matrix([(1, 1), (1, 1)]).tolist() == [[2, 2], [2, 2]]


def test_gram_inner_product_oracle():
    assert gram_matrix([(1, 0), (1, 1)]).tolist() == [[1, 1], [1, 2]]


def test_gram_dimension_mismatch_names_lengths():
    with pytest.raises(DimensionError) as exc:
        gram_matrix([(1, 2), (1, 2, 3)])
    assert exc.value.sizes == (2, 3)


def test_gram_empty_rejected():
    with pytest.raises(InvalidInputError):
        gram_matrix([])


@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(small_ints, min_size=1, max_size=4))
def test_gram_is_psd(vectors, v):
    G = gram_matrix(vectors)
    v = (v * 4)[: G.nrows]
    assert dot(G @ v, v) >= 0
    assert G.is_symmetric()


# determinant

def test_det_identity():
    assert determinant(Matrix.identity(3)) == 1


def test_det_dependent_rows():
    assert determinant(Matrix([[2, 2], [2, 2]])) == 0


def test_det_two_by_two():
    assert determinant(Matrix([[1, 1], [1, 2]])) == 1


def test_det_empty_matrix_is_one():
    assert determinant(Matrix([], EXACT)) == 1


def test_det_needs_pivot_swap():
    assert determinant(Matrix([[0, 1], [1, 0]])) == -1
    assert determinant(Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])) == -1


def test_det_non_square():
    with pytest.raises(DimensionError):
        determinant(Matrix([[1, 2, 3]]))


@given(square(4))
def test_det_matches_leibniz(rows):
    assert determinant(Matrix(rows)) == leibniz_det(rows)


@given(square(3), st.integers(1, 7))
def test_det_rational_entries(rows, q):
    rows = [[Fraction(x, q + i) for x in r] for i, r in enumerate(rows)]
    assert determinant(Matrix(rows)) == leibniz_det(rows)


@given(square(4))
def test_cofactor_expansion_every_row(rows):
    C = Matrix(rows)
    d = determinant(C)
    n = C.nrows
    for r in range(n):
        assert sum(C[r, s] * cofactor(C, r, s) for s in range(n)) == d


def test_float_det_lu_and_ldl():
    A = Matrix([[4.0, 2.0], [2.0, 3.0]])
    assert determinant(A) == pytest.approx(8.0)
    S = SymMatrix([[4.0, 2.0], [2.0, 3.0]], positive=True)
    assert determinant(S) == pytest.approx(8.0)
    assert determinant(Matrix([[1.0, 2.0], [2.0, 4.0]])) == 0.0


@pytest.mark.parametrize("order", [2, 5, 8, 12])
def test_float_spd_det_agrees_with_exact(order):
    rng = random.Random(order)
    for _ in range(5):
        vecs = [[rng.randint(-10, 10) for _ in range(order + 3)] for _ in range(order)]
        G = gram_matrix(vecs)
        rows = [[x + (order if i == j else 0) for j, x in enumerate(r)] for i, r in enumerate(G.rows)]
        assert max(abs(x) for r in rows for x in r) <= 1000
        exact = determinant(SymMatrix(rows, EXACT, positive=True))
        approx = determinant(SymMatrix(rows, FLOAT, positive=True))
        assert abs(approx - float(exact)) <= 1e-9 * abs(float(exact))


def test_singular_float_pivot_below_floor():
    tight = Float64(abs_tol=1e-3)
    assert determinant(Matrix([[1e-4, 0.0], [0.0, 1.0]], tight)) == 0.0


# cofactor / minors

def test_cofactor_identity():
    I = Matrix.identity(2)
    assert cofactor(I, 0, 0) == 1
    assert cofactor(I, 0, 1) == 0


def test_cofactor_minor_deletion_oracle():
    rows = [[1, 2], [3, 4]]
    assert cofactor(Matrix(rows), 0, 1) == -leibniz_det(delete(rows, 0, 1)) == -3


def test_cofactor_out_of_range():
    with pytest.raises(IndexError):
        cofactor(Matrix.identity(2), 0, 2)


def test_principal_minor():
    C = Matrix.diag([2, 3, 5])
    assert principal_minor(C, (0, 1, 2)) == determinant(C)
    assert principal_minor(C, (0, 2)) == 10
    assert principal_minor(C, ()) == 1


@pytest.mark.parametrize("alpha", [(1, 0), (0, 0), (0, 3), (-1,)])
def test_principal_minor_invalid_subset(alpha):
    with pytest.raises(InvalidInputError):
        principal_minor(Matrix.diag([2, 3, 5]), alpha)


# solves

def test_spd_solve_identity():
    assert spd_solve(Matrix.identity(3), [4, -1, 7]) == [4, -1, 7]


def test_spd_solve_cramer_oracle():
    assert spd_solve(Matrix([[1, 1], [1, 2]]), [1, 1]) == [1, 0]


def test_spd_solve_random_residual_exact():
    rng = random.Random(3)
    for _ in range(20):
        vecs = [[rng.randint(-5, 5) for _ in range(6)] for _ in range(4)]
        A = gram_matrix(vecs)
        if determinant(A) == 0:
            continue
        b = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(4)]
        assert A @ spd_solve(A, b) == b


def test_spd_solve_singular():
    with pytest.raises(SingularMatrixError):
        spd_solve(Matrix([[1, 1], [1, 1]]), [1, 2])


def test_solve_and_inverse_general():
    A = Matrix([[0, 2, 1], [1, 1, 0], [3, 0, 1]])
    b = [1, 2, 3]
    assert A @ solve(A, b) == b
    assert A @ inverse(A) == Matrix.identity(3)


# rank-one determinant update

def test_rank1_identity_e1():
    assert det_rank1_update(1, Matrix.identity(2), [1, 0]) == 2


def test_rank1_zero_update():
    A = Matrix([[2, 1], [1, 3]])
    assert det_rank1_update(5, A, [0, 0]) == 5


def test_rank1_matches_batch_exact():
    rng = random.Random(11)
    for _ in range(25):
        vecs = [[rng.randint(-4, 4) for _ in range(7)] for _ in range(5)]
        A = gram_matrix(vecs)
        d = determinant(A)
        if d == 0:
            continue
        c = [rng.randint(-6, 6) for _ in range(5)]
        updated = Matrix([[A[i, j] + c[i] * c[j] for j in range(5)] for i in range(5)])
        assert det_rank1_update(d, A, c) == determinant(updated)


def test_rank1_matches_batch_float():
    rng = random.Random(12)
    for _ in range(25):
        n = 5
        vecs = [[rng.uniform(-1, 1) for _ in range(n + 4)] for _ in range(n)]
        A = gram_matrix(vecs)
        A = SymMatrix([[x + (1.0 if i == j else 0.0) for j, x in enumerate(r)] for i, r in enumerate(A.rows)],
                      positive=True)
        c = [rng.uniform(-1, 1) for _ in range(n)]
        updated = SymMatrix([[A[i, j] + c[i] * c[j] for j in range(n)] for i in range(n)], positive=True)
        got = det_rank1_update(determinant(A), A, c)
        assert abs(got - determinant(updated)) <= 1e-10 * abs(determinant(updated))


def test_rank1_singular_base():
    with pytest.raises(SingularMatrixError):
        det_rank1_update(0, Matrix([[1, 1], [1, 1]]), [1, 0])


def test_matrix_immutable_shape_checks():
    with pytest.raises(DimensionError):
        Matrix([[1, 2], [3]])
    with pytest.raises(IndexError):
        Matrix([[1]])[1, 0]
    with pytest.raises(InvalidInputError):
        SymMatrix([[1, 2], [3, 4]])
