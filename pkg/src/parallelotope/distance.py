"""Distance from a vector to the span of a basis, via Gram determinants.

The squared distance is the ratio Gamma(f0, f1..fm) / Gamma(f1..fm); the
minimizing coefficients come either from the normal equations or from
cofactors of the bordered Gram matrix of (f0, f1, ..., fm).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionError, InvalidInputError, SingularMatrixError, VerificationError
from .matrix import Matrix, SymMatrix, cofactor, determinant, dot, gram_matrix, spd_solve
from .scalar import Field, infer_field


@dataclass(frozen=True)
class QuadraticForm:
    """``F(t) = (A t, t) - 2 (t, b) + c``, the squared norm of ``f0 - sum t_k f_k``."""

    A: SymMatrix
    b: tuple
    c: object

    @classmethod
    def from_vectors(cls, f0: Sequence, basis: Sequence[Sequence], field: Field | None = None) -> QuadraticForm:
        B = bordered_gram(f0, basis, field)
        m = len(basis)
        A = SymMatrix.of(B.submatrix(range(1, m + 1), range(1, m + 1)), positive=True)
        return cls(A, tuple(B.row(0)[1:]), B[0, 0])

    @property
    def field(self) -> Field:
        return self.A.field

    def __call__(self, t: Sequence):
        return eval_form(self, t)


@dataclass(frozen=True)
class DistanceResult:
    d_squared: object
    minimizer: tuple
    numerator: object  # Gamma(f0, f1, ..., fm)
    denominator: object  # Gamma(f1, ..., fm)

    @property
    def gram_ratio(self):
        return self.numerator / self.denominator


def bordered_gram(f0: Sequence, basis: Sequence[Sequence], field: Field | None = None) -> SymMatrix:
    if field is None:
        field = infer_field(list(f0) + [x for v in basis for x in v])
    return gram_matrix([f0, *basis], field)


def _dependent_subset(G: Matrix) -> tuple[int, ...]:
    """Smallest-found subset of basis indices whose Gram determinant vanishes."""
    field = G.field
    n = G.nrows
    chosen: list[int] = []
    for i in range(n):
        chosen.append(i)
        if field.is_zero(determinant(G.principal(chosen))):
            break
    for i in list(chosen):
        trial = [j for j in chosen if j != i]
        if trial and field.is_zero(determinant(G.principal(trial))):
            chosen = trial
    return tuple(chosen)


def distance_squared(f0: Sequence, basis: Sequence[Sequence], *, field: Field | None = None,
                     cross_check: bool = True) -> DistanceResult:
    """Squared distance from ``f0`` to ``span(basis)`` and the minimizing coefficients.

    With ``cross_check`` the Gram-ratio value is compared against
    ``(f0, f0) - (A^-1 b, b)`` and a disagreement raises VerificationError.
    """
    if not basis:
        raise InvalidInputError("basis must contain at least one vector")
    B = bordered_gram(f0, basis, field)
    field = B.field
    m = len(basis)
    A = SymMatrix.of(B.submatrix(range(1, m + 1), range(1, m + 1)), positive=True)
    den = determinant(A)
    if field.is_zero(den):
        subset = _dependent_subset(A)
        raise SingularMatrixError(f"basis vectors {list(subset)} are linearly dependent", subset)
    num = determinant(B)
    d2 = num / den
    b = B.row(0)[1:]
    t0 = spd_solve(A, b)
    if cross_check:
        normal = B[0, 0] - dot(t0, b, field)
        if not field.eq(d2, normal):
            raise VerificationError(f"Gram ratio {d2} differs from normal-equation value {normal}")
    return DistanceResult(d2, tuple(t0), num, den)


def minimizer_from_bordered(B: Matrix, row: int = 0) -> tuple:
    """Least-squares coefficients of vector ``row`` against the others, from cofactors of ``B``.

    For ``row == 0`` this is ``-(A^0_1, ..., A^0_m) / A^0_0``.
    """
    field = B.field
    pivot = cofactor(B, row, row)
    if field.is_zero(pivot):
        raise SingularMatrixError(f"principal cofactor A^{row}_{row} vanishes")
    return tuple(-cofactor(B, row, s) / pivot for s in range(B.nrows) if s != row)


def minimizer_cramer(f0: Sequence, basis: Sequence[Sequence], *, field: Field | None = None) -> tuple:
    if not basis:
        raise InvalidInputError("basis must contain at least one vector")
    return minimizer_from_bordered(bordered_gram(f0, basis, field))


def eval_form(F: QuadraticForm, t: Sequence):
    field = F.field
    t = [field.coerce(x) for x in t]
    if len(t) != len(F.b):
        raise DimensionError(f"argument has length {len(t)}, form has {len(F.b)} variables", len(t), len(F.b))
    At = F.A @ t
    return dot(At, t, field) - 2 * dot(t, F.b, field) + F.c


def residual_inner_products(f0: Sequence, basis: Sequence[Sequence], t: Sequence, field: Field) -> list:
    """``(f_r, f0 - sum t_k f_k)`` for each basis vector; all zero at the minimizer."""
    n = len(f0)
    h = [field.coerce(f0[i]) - field.sum(field.coerce(t[k]) * field.coerce(basis[k][i]) for k in range(len(basis)))
         for i in range(n)]
    return [dot([field.coerce(x) for x in fr], h, field) for fr in basis]


@dataclass(frozen=True)
class ConstrainedMin:
    value: object
    argmin: tuple


def constrained_min(A: Matrix, b: Sequence) -> ConstrainedMin:
    """Minimum of ``(A x, x)`` subject to ``(x, b) = 1`` for positive definite ``A``."""
    field = A.field
    b = [field.coerce(x) for x in b]
    if all(field.is_zero(x) for x in b):
        raise InvalidInputError("constraint vector b must be nonzero")
    u = spd_solve(A, b)
    q = dot(u, b, field)
    argmin = tuple(x / q for x in u)
    if not field.eq(dot(argmin, b, field), 1):
        raise VerificationError("argmin violates the constraint (x, b) = 1")
    return ConstrainedMin(1 / q, argmin)


def constrained_min_diagonal(a: Sequence, b: Sequence | None = None, field: Field | None = None) -> ConstrainedMin:
    """Closed form for ``A = diag(a)``: value ``(sum b_k^2 / a_k)^-1``.

    ``b`` defaults to the all-ones vector (the sum-to-one constraint).
    """
    if field is None:
        field = infer_field(list(a) + list(b or []))
    a = [field.coerce(x) for x in a]
    if any(x <= 0 for x in a):
        raise InvalidInputError("diagonal weights must be positive")
    b = [field.coerce(1)] * len(a) if b is None else [field.coerce(x) for x in b]
    if len(b) != len(a):
        raise DimensionError("weights and constraint differ in length", len(a), len(b))
    s = field.sum(bk * bk / ak for ak, bk in zip(a, b))
    if field.is_zero(s):
        raise InvalidInputError("constraint vector b must be nonzero")
    return ConstrainedMin(1 / s, tuple(bk / ak / s for ak, bk in zip(a, b)))
