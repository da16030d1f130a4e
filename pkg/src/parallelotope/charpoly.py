"""Generalized characteristic polynomial ``P_C(lam) = det(diag(lam) + C)``.

Subset expansions over principal minors and cofactors, the explicit
inverse of ``C(lam)`` and its quadratic form, the shifted-Gram quotient
``delta_ratio`` and the Cauchy-Binet check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .errors import CapacityError, DimensionError, InvalidInputError, VerificationError
from .matrix import (
    Matrix,
    SymMatrix,
    adjugate,
    as_matrix,
    complementary_principal_minor,
    determinant,
    dot,
    gram_matrix,
    principal_minor,
    validate_subset,
)
from .scalar import Field

SUBSET_CAP = 20


def subsets(n: int, *, nonempty: bool = False) -> Iterator[tuple[int, ...]]:
    """All subsets of ``range(n)`` by size, then lexicographically."""
    for r in range(1 if nonempty else 0, n + 1):
        yield from combinations(range(n), r)


def _weights(lam: Sequence, n: int, field: Field, *, positive: bool = False) -> list:
    lam = [field.coerce(x) for x in lam]
    if len(lam) != n:
        raise DimensionError(f"{len(lam)} weights for a matrix of order {n}", len(lam), n)
    if positive and any(x <= 0 for x in lam):
        raise InvalidInputError("weights must be strictly positive")
    return lam


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapacityError(f"subset expansion of order {n} exceeds cap {cap} (2^{n} terms)")


def shifted(C: Matrix, lam: Sequence) -> Matrix:
    """``C(lam) = diag(lam) + C``."""
    rows = [list(r) for r in C.rows]
    for i, x in enumerate(lam):
        rows[i][i] += x
    if isinstance(C, SymMatrix):
        return SymMatrix(rows, C.field, positive=C.positive and all(x >= 0 for x in lam))
    return Matrix(rows, C.field)


def gen_charpoly_direct(C, lam: Sequence):
    C = as_matrix(C)
    if not C.is_square:
        raise DimensionError("matrix must be square", C.nrows, C.ncols)
    lam = _weights(lam, C.nrows, C.field)
    return determinant(shifted(C, lam))


def gen_charpoly_subset(C, lam: Sequence, *, cap: int = SUBSET_CAP):
    """``sum over alpha of lam_alpha * A^alpha_alpha(C)``, with ``lam_{} = 1`` and ``A^{}_{}(C) = det C``."""
    C = as_matrix(C)
    if not C.is_square:
        raise DimensionError("matrix must be square", C.nrows, C.ncols)
    n = C.nrows
    _check_cap(n, cap)
    field = C.field
    lam = _weights(lam, n, field)
    return field.sum(
        math.prod((lam[i] for i in alpha), start=field.coerce(1)) * complementary_principal_minor(C, alpha)
        for alpha in subsets(n)
    )


def gen_charpoly_minor_form(C, lam: Sequence, *, cap: int = SUBSET_CAP):
    """``prod(lam) * sum over alpha of M^alpha_alpha(C) / lam_alpha``; needs nonzero weights."""
    C = as_matrix(C)
    n = C.nrows
    _check_cap(n, cap)
    field = C.field
    lam = _weights(lam, n, field)
    if any(field.is_zero(x) for x in lam):
        raise InvalidInputError("minor form divides by every weight")
    one = field.coerce(1)
    total = field.sum(
        principal_minor(C, alpha) / math.prod((lam[i] for i in alpha), start=one) for alpha in subsets(n)
    )
    return math.prod(lam, start=one) * total


def _embedded_adjugates(C: Matrix, lam: list) -> Iterator[tuple[tuple[int, ...], object, Matrix]]:
    """Yield ``(alpha, prod(lam) / lam_alpha, adj(C_alpha))`` over nonempty subsets."""
    one = C.field.coerce(1)
    n = C.nrows
    for alpha in subsets(n, nonempty=True):
        weight = math.prod((lam[i] for i in range(n) if i not in alpha), start=one)
        yield alpha, weight, adjugate(C.principal(alpha))


def inverse_lambda(C, lam: Sequence, *, cap: int = SUBSET_CAP) -> Matrix:
    """``C(lam)^-1`` assembled from the adjugates of all principal submatrices."""
    C = as_matrix(C)
    if not C.is_square:
        raise DimensionError("matrix must be square", C.nrows, C.ncols)
    n = C.nrows
    _check_cap(n, cap)
    field = C.field
    lam = _weights(lam, n, field, positive=True)
    P = gen_charpoly_direct(C, lam)
    acc = [[field.coerce(0)] * n for _ in range(n)]
    for alpha, weight, adj in _embedded_adjugates(C, lam):
        for a, i in enumerate(alpha):
            for b, j in enumerate(alpha):
                acc[i][j] += weight * adj.rows[a][b]
    return Matrix([[x / P for x in r] for r in acc], field)


def quadform_lambda(C, lam: Sequence, a: Sequence, *, cap: int = SUBSET_CAP):
    """``(C(lam)^-1 a, a)`` by the subset formula."""
    C = as_matrix(C)
    if not C.is_square:
        raise DimensionError("matrix must be square", C.nrows, C.ncols)
    n = C.nrows
    _check_cap(n, cap)
    field = C.field
    lam = _weights(lam, n, field, positive=True)
    a = [field.coerce(x) for x in a]
    if len(a) != n:
        raise DimensionError(f"vector of length {len(a)} for order {n}", len(a), n)
    P = gen_charpoly_direct(C, lam)
    total = field.sum(
        weight * dot(adj @ [a[i] for i in alpha], [a[i] for i in alpha], field)
        for alpha, weight, adj in _embedded_adjugates(C, lam)
    )
    return total / P


# ---------------------------------------------------------------------------
# Gram-matrix specializations


def _shifted_gram_det(vectors: Sequence[Sequence], field: Field):
    if not vectors:
        return field.coerce(1)
    G = gram_matrix(vectors, field)
    return determinant(shifted(G, [1] * G.nrows))


def delta_ratio(Y: Sequence[Sequence], field: Field | None = None):
    """``det(I_m + gram(y_1..y_m)) / det(I_{m-1} + gram(y_2..y_m)) - 1``."""
    if not Y:
        raise InvalidInputError("delta_ratio needs at least one vector")
    if field is None:
        field = gram_matrix(Y).field
    return _shifted_gram_det(Y, field) / _shifted_gram_det(Y[1:], field) - 1


def delta_input(A, lam: Sequence) -> list[list]:
    """Rows ``y_r = (a_rk / sqrt(lam_k))_k``; exact mode requires perfect-square weights."""
    A = as_matrix(A)
    field = A.field
    lam = _weights(lam, A.ncols, field, positive=True)
    try:
        roots = [field.sqrt(x) for x in lam]
    except ValueError as exc:
        raise InvalidInputError(f"exact mode needs rational square roots of the weights: {exc}") from None
    return [[x / r for x, r in zip(row, roots)] for row in A.rows]


@dataclass(frozen=True)
class IdentityCheck:
    lhs: object
    rhs: object
    equal: bool


def delta_identity_check(A, lam: Sequence) -> IdentityCheck:
    """Compare ``(C(lam)^-1 a, a)`` with ``delta_ratio(y)``.

    ``a`` is the first row of ``A`` and ``C`` the Gram matrix of the
    columns of the remaining rows.
    """
    A = as_matrix(A)
    if A.nrows < 2:
        raise InvalidInputError("need at least two rows: a and one g-row")
    field = A.field
    g_rows = A.submatrix(range(1, A.nrows), range(A.ncols))
    C = gram_matrix(g_rows.columns(), field)
    lhs = quadform_lambda(C, lam, A.row(0))
    rhs = delta_ratio(delta_input(A, lam), field)
    return IdentityCheck(lhs, rhs, field.eq(lhs, rhs))


@dataclass(frozen=True)
class GramCharpolyExpansion:
    direct: object
    gram_sum: object
    minor_sum: object


def gram_charpoly_expansion(X, lam: Sequence, *, cap: int = SUBSET_CAP) -> GramCharpolyExpansion:
    """Three evaluations of ``det(diag(lam) + gram(x_1..x_n))`` for the columns of ``X``.

    Raises VerificationError unless all three agree.
    """
    X = as_matrix(X)
    m, n = X.shape
    _check_cap(n, cap)
    field = X.field
    lam = _weights(lam, n, field, positive=True)
    cols = X.columns()
    C = gram_matrix(cols, field)
    direct = determinant(shifted(C, lam))
    one = field.coerce(1)
    lam_prod = math.prod(lam, start=one)
    gram_terms = []
    minor_terms = []
    for alpha in subsets(n, nonempty=True):
        inv_w = one / math.prod((lam[i] for i in alpha), start=one)
        gram_terms.append(inv_w * determinant(C.principal(alpha)))
        if len(alpha) <= m:
            minor_terms.append(inv_w * field.sum(
                determinant(X.submatrix(beta, alpha)) ** 2 for beta in combinations(range(m), len(alpha))
            ))
    gram_sum = lam_prod * (1 + field.sum(gram_terms))
    minor_sum = lam_prod * (1 + field.sum(minor_terms))
    if not (field.eq(direct, gram_sum) and field.eq(direct, minor_sum)):
        raise VerificationError(f"expansions disagree: {direct}, {gram_sum}, {minor_sum}")
    return GramCharpolyExpansion(direct, gram_sum, minor_sum)


@dataclass(frozen=True)
class CauchyBinet:
    gram_det: object
    minor_sum: object
    equal: bool


def cauchy_binet_check(X, alpha: Sequence[int]) -> CauchyBinet:
    """Gram determinant of the columns ``alpha`` against the sum of squared maximal minors."""
    X = as_matrix(X)
    field = X.field
    m, n = X.shape
    alpha = validate_subset(alpha, n)
    r = len(alpha)
    zero = field.coerce(0)
    if r > m:
        return CauchyBinet(zero, zero, True)
    if r == 0:
        one = field.coerce(1)
        return CauchyBinet(one, one, True)
    gram_det = determinant(gram_matrix([X.column(j) for j in alpha], field))
    minor_sum = field.sum(determinant(X.submatrix(beta, alpha)) ** 2 for beta in combinations(range(m), r))
    return CauchyBinet(gram_det, minor_sum, field.eq(gram_det, minor_sum))


@dataclass(frozen=True)
class TransposeDets:
    det_gram_cols: object
    det_gram_rows: object
    equal: bool


def square_transpose_det_check(X) -> TransposeDets:
    """``det(X^T X)`` against ``det(X X^T)`` for square ``X``."""
    X = as_matrix(X)
    if not X.is_square:
        raise DimensionError(
            f"transpose identity is only checked for square matrices, got {X.nrows}x{X.ncols}",
            X.nrows, X.ncols,
        )
    field = X.field
    cols = determinant(gram_matrix(X.columns(), field))
    rows = determinant(gram_matrix([list(r) for r in X.rows], field))
    return TransposeDets(cols, rows, field.eq(cols, rows))
