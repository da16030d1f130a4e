"""Dense matrices over the scalar backends.

Indices are 0-based throughout. Exact determinants use fraction-free
Bareiss elimination on an integer-scaled copy; float determinants use
LDL^T for matrices tagged positive and partial-pivot LU otherwise.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, InvalidInputError, SingularMatrixError
from .scalar import EXACT, Field, infer_field


class Matrix:
    """Immutable rectangular matrix (``RectMatrix``)."""

    __slots__ = ("rows", "field", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], field: Field | None = None, ncols: int | None = None):
        raw = [list(r) for r in rows]
        if field is None:
            field = infer_field(x for r in raw for x in r)
        if raw:
            width = len(raw[0])
            for i, r in enumerate(raw):
                if len(r) != width:
                    raise DimensionError(
                        f"row {i} has {len(r)} entries, expected {width}", len(r), width
                    )
        else:
            width = ncols or 0
        self.rows = tuple(tuple(field.coerce(x) for x in r) for r in raw)
        self.field = field
        self.nrows = len(raw)
        self.ncols = width

    # construction helpers

    @classmethod
    def identity(cls, n: int, field: Field = EXACT) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, m: int, n: int, field: Field = EXACT) -> Matrix:
        return cls([[0] * n for _ in range(m)], field, ncols=n)

    @classmethod
    def diag(cls, values: Sequence, field: Field | None = None) -> Matrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], field)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], field: Field | None = None) -> Matrix:
        if not columns:
            raise InvalidInputError("at least one column required")
        return cls(list(zip(*columns)), field)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, idx):
        i, j = idx
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry ({i}, {j}) outside {self.nrows}x{self.ncols} matrix")
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tolist()!r})"

    # arithmetic

    def _like(self, rows, field=None) -> Matrix:
        return Matrix(rows, field or self.field, ncols=self.ncols)

    @property
    def T(self) -> Matrix:
        return Matrix(list(zip(*self.rows)), self.field, ncols=self.nrows)

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition", self.shape, other.shape)
        return self._like([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in subtraction", self.shape, other.shape)
        return self._like([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c) -> Matrix:
        c = self.field.coerce(c)
        return self._like([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        fsum = self.field.sum
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionError("inner dimensions differ", self.ncols, other.nrows)
            cols = other.columns()
            return Matrix(
                [[fsum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows],
                self.field,
                ncols=other.ncols,
            )
        v = [self.field.coerce(x) for x in other]
        if len(v) != self.ncols:
            raise DimensionError("vector length differs from column count", len(v), self.ncols)
        return [fsum(a * b for a, b in zip(r, v)) for r in self.rows]

    def matvec(self, v: Sequence) -> list:
        return self @ v

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], self.field, ncols=len(cols))

    def principal(self, alpha: Sequence[int]) -> Matrix:
        return self.submatrix(alpha, alpha)

    def delete(self, r: int, s: int) -> Matrix:
        """Copy with row ``r`` and column ``s`` removed."""
        rows = [i for i in range(self.nrows) if i != r]
        cols = [j for j in range(self.ncols) if j != s]
        return self.submatrix(rows, cols)

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        eq = self.field.eq
        n = self.nrows
        return all(eq(self.rows[i][j], self.rows[j][i]) for i in range(n) for j in range(i + 1, n))


class SymMatrix(Matrix):
    """Square matrix with ``entry(i, j) == entry(j, i)``.

    ``positive`` marks matrices known to be positive semidefinite by
    construction (Gram matrices and their shifts); float determinants of
    such matrices go through LDL^T.
    """

    __slots__ = ("positive",)

    def __init__(self, rows, field: Field | None = None, positive: bool = False, ncols: int | None = None):
        super().__init__(rows, field, ncols=ncols)
        if not self.is_square:
            raise DimensionError("symmetric matrix must be square", self.nrows, self.ncols)
        if not self.is_symmetric():
            raise InvalidInputError("matrix is not symmetric")
        self.positive = positive

    @classmethod
    def of(cls, m: Matrix, positive: bool = False) -> SymMatrix:
        return cls(m.rows, m.field, positive=positive, ncols=m.ncols)


def as_matrix(x, field: Field | None = None) -> Matrix:
    if isinstance(x, Matrix):
        if field is None or field == x.field:
            return x
        return Matrix(x.rows, field, ncols=x.ncols)
    return Matrix(x, field)


def dot(u: Sequence, v: Sequence, field: Field = EXACT):
    if len(u) != len(v):
        raise DimensionError(f"vectors of lengths {len(u)} and {len(v)}", len(u), len(v))
    return field.sum(a * b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# Gram matrices


def gram_matrix(vectors: Sequence[Sequence], field: Field | None = None) -> SymMatrix:
    """Gram matrix of pairwise inner products ``((x_k, x_r))``."""
    if not vectors:
        raise InvalidInputError("gram_matrix needs at least one vector")
    length = len(vectors[0])
    for v in vectors:
        if len(v) != length:
            raise DimensionError(
                f"vector lengths differ: {length} and {len(v)}", length, len(v)
            )
    if field is None:
        field = infer_field(x for v in vectors for x in v)
    vs = [[field.coerce(x) for x in v] for v in vectors]
    m = len(vs)
    g = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            g[i][j] = g[j][i] = field.sum(a * b for a, b in zip(vs[i], vs[j]))
    return SymMatrix(g, field, positive=True)


# ---------------------------------------------------------------------------
# determinants


def _bareiss_int(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_exact(rows) -> Fraction:
    scaled = []
    scale = 1
    for r in rows:
        lcm = 1
        for x in r:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        scaled.append([x.numerator * (lcm // x.denominator) for x in r])
        scale *= lcm
    return Fraction(_bareiss_int(scaled), scale)


def _det_lu(rows, abs_tol: float) -> float:
    a = [list(r) for r in rows]
    n = len(a)
    det = 1.0
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if abs(a[p][k]) < abs_tol:
            return 0.0
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        akk = a[k][k]
        det *= akk
        for i in range(k + 1, n):
            f = a[i][k] / akk
            if f:
                ri, rk = a[i], a[k]
                for j in range(k + 1, n):
                    ri[j] -= f * rk[j]
    return det


def _ldl(rows, abs_tol: float):
    """LDL^T without pivoting; ``None`` if a pivot falls below the floor."""
    n = len(rows)
    L = [[0.0] * n for _ in range(n)]
    d = [0.0] * n
    for j in range(n):
        dj = rows[j][j] - math.fsum(L[j][k] * L[j][k] * d[k] for k in range(j))
        if dj < abs_tol:
            return None
        d[j] = dj
        L[j][j] = 1.0
        for i in range(j + 1, n):
            L[i][j] = (rows[i][j] - math.fsum(L[i][k] * L[j][k] * d[k] for k in range(j))) / dj
    return L, d


def determinant(C: Matrix):
    if not C.is_square:
        raise DimensionError("determinant of a non-square matrix", C.nrows, C.ncols)
    field = C.field
    if field.exact:
        return _det_exact(C.rows)
    if getattr(C, "positive", False):
        f = _ldl(C.rows, field.abs_tol)
        if f is not None:
            return math.prod(f[1])
    return _det_lu(C.rows, field.abs_tol)


def _check_index(C: Matrix, r: int, s: int) -> None:
    if not (0 <= r < C.nrows and 0 <= s < C.ncols):
        raise IndexError(f"cofactor index ({r}, {s}) outside {C.nrows}x{C.ncols} matrix")


def minor(C: Matrix, r: int, s: int):
    """Determinant of ``C`` with row ``r`` and column ``s`` removed."""
    _check_index(C, r, s)
    return determinant(C.delete(r, s))


def cofactor(C: Matrix, r: int, s: int):
    if not C.is_square:
        raise DimensionError("cofactor of a non-square matrix", C.nrows, C.ncols)
    m = minor(C, r, s)
    return m if (r + s) % 2 == 0 else -m


def cofactor_matrix(C: Matrix) -> Matrix:
    """Matrix of first-order cofactors ``(A^i_j(C))``; order 0 gives 0x0."""
    n = C.nrows
    return Matrix([[cofactor(C, i, j) for j in range(n)] for i in range(n)], C.field, ncols=n)


def adjugate(C: Matrix) -> Matrix:
    return cofactor_matrix(C).T


def validate_subset(alpha: Sequence[int], n: int) -> tuple[int, ...]:
    alpha = tuple(alpha)
    for a, b in zip(alpha, alpha[1:]):
        if not a < b:
            raise InvalidInputError(f"subset {alpha} is not strictly increasing")
    if alpha and not (0 <= alpha[0] and alpha[-1] < n):
        raise InvalidInputError(f"subset {alpha} outside range 0..{n - 1}")
    return alpha


def principal_minor(C: Matrix, alpha: Sequence[int]):
    """Determinant of the principal submatrix on ``alpha``; the empty subset gives 1."""
    if not C.is_square:
        raise DimensionError("principal minor of a non-square matrix", C.nrows, C.ncols)
    alpha = validate_subset(alpha, C.nrows)
    if not alpha:
        return C.field.coerce(1)
    return determinant(C.principal(alpha))


def complementary_principal_minor(C: Matrix, alpha: Sequence[int]):
    """Principal cofactor ``A^alpha_alpha(C)``: the minor on the complement of ``alpha``."""
    alpha = validate_subset(alpha, C.nrows)
    rest = [i for i in range(C.nrows) if i not in alpha]
    return principal_minor(C, rest)


# ---------------------------------------------------------------------------
# solves


def spd_solve(A: Matrix, b: Sequence) -> list:
    """Solve ``A t = b`` for symmetric positive definite ``A`` via LDL^T.

    Raises SingularMatrixError on an exact zero pivot (or a float pivot
    below the absolute floor).
    """
    if not A.is_square:
        raise DimensionError("spd_solve needs a square matrix", A.nrows, A.ncols)
    field = A.field
    n = A.nrows
    b = [field.coerce(x) for x in b]
    if len(b) != n:
        raise DimensionError(f"right-hand side has length {len(b)}, matrix order {n}", len(b), n)
    a = A.rows
    fsum = field.sum
    L = [[field.coerce(0)] * n for _ in range(n)]
    d = [field.coerce(0)] * n
    for j in range(n):
        dj = a[j][j] - fsum(L[j][k] * L[j][k] * d[k] for k in range(j))
        if field.is_zero(dj):
            raise SingularMatrixError(f"zero pivot at position {j}")
        d[j] = dj
        for i in range(j + 1, n):
            L[i][j] = (a[i][j] - fsum(L[i][k] * L[j][k] * d[k] for k in range(j))) / dj
    y = [None] * n
    for i in range(n):
        y[i] = b[i] - fsum(L[i][k] * y[k] for k in range(i))
    z = [y[i] / d[i] for i in range(n)]
    t = [None] * n
    for i in reversed(range(n)):
        t[i] = z[i] - fsum(L[k][i] * t[k] for k in range(i + 1, n))
    return t


def solve(A: Matrix, b: Sequence) -> list:
    """General square solve by Gaussian elimination with partial pivoting."""
    if not A.is_square:
        raise DimensionError("solve needs a square matrix", A.nrows, A.ncols)
    field = A.field
    n = A.nrows
    b = [field.coerce(x) for x in b]
    if len(b) != n:
        raise DimensionError(f"right-hand side has length {len(b)}, matrix order {n}", len(b), n)
    a = [list(r) + [b[i]] for i, r in enumerate(A.rows)]
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if field.is_zero(a[p][k]):
            raise SingularMatrixError(f"zero pivot in column {k}")
        a[k], a[p] = a[p], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n + 1):
                    a[i][j] -= f * a[k][j]
    t = [None] * n
    for i in reversed(range(n)):
        t[i] = (a[i][n] - field.sum(a[i][j] * t[j] for j in range(i + 1, n))) / a[i][i]
    return t


def inverse(A: Matrix) -> Matrix:
    """Inverse by Gauss-Jordan elimination with partial pivoting."""
    if not A.is_square:
        raise DimensionError("inverse needs a square matrix", A.nrows, A.ncols)
    field = A.field
    n = A.nrows
    one, zero = field.coerce(1), field.coerce(0)
    a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(A.rows)]
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if field.is_zero(a[p][k]):
            raise SingularMatrixError(f"zero pivot in column {k}")
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        a[k] = [x / piv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return Matrix([r[n:] for r in a], field, ncols=n)


def det_rank1_update(det, A: Matrix, c: Sequence):
    """``det(A + c c^T)`` from ``det = det(A)`` by the matrix determinant lemma."""
    field = A.field
    c = [field.coerce(x) for x in c]
    if len(c) != A.nrows:
        raise DimensionError(f"update vector has length {len(c)}, matrix order {A.nrows}", len(c), A.nrows)
    if field.is_zero(det):
        raise SingularMatrixError("determinant lemma needs a nonsingular base matrix")
    u = spd_solve(A, c)
    return det * (1 + field.sum(x * y for x, y in zip(c, u)))
