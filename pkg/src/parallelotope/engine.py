"""Streaming Gram-ratio series for growing projections of a vector family.

The Gram matrix of ``f_0^(n), ..., f_m^(n)`` grows by one rank-1 term
``c c^T`` per column, ``c = (f_{r,n+1})_r``. Determinants follow by the
matrix determinant lemma; exact mode keeps an explicit inverse
(Sherman-Morrison), float mode keeps a Cholesky factor (rank-1
update). Both are rebuilt from scratch every ``reanchor`` steps.
"""
from __future__ import annotations

import math
import random
import statistics
import time
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .errors import DegeneracyError, HorizonError, InvalidInputError
from .families import VectorFamily
from .distance import minimizer_from_bordered
from .matrix import Matrix, SymMatrix, _ldl, cofactor, determinant, gram_matrix, inverse, solve
from .scalar import EXACT, FLOAT, Field

REANCHOR_DEFAULT = 64
EXACT_AUTO_LIMIT = 512


def auto_field(family: VectorFamily, n_max: int) -> Field:
    """Exact for integer families up to ``EXACT_AUTO_LIMIT`` columns, float beyond."""
    return EXACT if family.integral and n_max <= EXACT_AUTO_LIMIT else FLOAT


# ---------------------------------------------------------------------------
# determinant tracking


def _cholesky(rows, abs_tol):
    f = _ldl(rows, abs_tol)
    if f is None:
        return None
    L, d = f
    n = len(rows)
    return tuple(tuple(L[i][j] * math.sqrt(d[j]) for j in range(n)) for i in range(n))


def _cholupdate(L, x):
    n = len(L)
    L = [list(r) for r in L]
    x = list(x)
    for k in range(n):
        lkk = L[k][k]
        r = math.hypot(lkk, x[k])
        c = r / lkk
        s = x[k] / lkk
        L[k][k] = r
        for i in range(k + 1, n):
            L[i][k] = (L[i][k] + s * x[i]) / c
            x[i] = c * x[i] - s * L[i][k]
    return tuple(tuple(r) for r in L)


def _forward(L, b):
    y = []
    for i, row in enumerate(L):
        y.append((b[i] - math.fsum(row[k] * y[k] for k in range(i))) / row[i])
    return y


def _backward(L, y):
    n = len(L)
    x = [0.0] * n
    for i in reversed(range(n)):
        x[i] = (y[i] - math.fsum(L[k][i] * x[k] for k in range(i + 1, n))) / L[i][i]
    return x


@dataclass(frozen=True)
class DetTracker:
    """Determinant and inverse factorization of a PSD matrix under ``A += c c^T``.

    ``factor`` is the exact inverse (exact mode) or the lower Cholesky
    factor (float mode), or ``None`` while the matrix is singular.
    """

    rows: tuple
    det: object
    factor: tuple | None
    field: Field

    @classmethod
    def anchored(cls, rows, field: Field) -> DetTracker:
        rows = tuple(tuple(r) for r in rows)
        M = SymMatrix(rows, field, positive=True, ncols=len(rows))
        det = determinant(M)
        if field.exact:
            factor = None if det == 0 else _exact_inverse(rows)
        else:
            factor = _cholesky(rows, field.abs_tol)
        return cls(rows, det, factor, field)

    @property
    def order(self) -> int:
        return len(self.rows)

    def update(self, c: Sequence) -> DetTracker:
        n = self.order
        rows = tuple(tuple(self.rows[i][j] + c[i] * c[j] for j in range(n)) for i in range(n))
        if self.factor is None:
            return DetTracker.anchored(rows, self.field)
        fsum = self.field.sum
        if self.field.exact:
            inv = self.factor
            u = [fsum(a * b for a, b in zip(r, c)) for r in inv]
            denom = 1 + fsum(a * b for a, b in zip(c, u))
            new_inv = tuple(tuple(inv[i][j] - u[i] * u[j] / denom for j in range(n)) for i in range(n))
            return DetTracker(rows, self.det * denom, new_inv, self.field)
        w = _forward(self.factor, c)
        denom = 1.0 + math.fsum(x * x for x in w)
        return DetTracker(rows, self.det * denom, _cholupdate(self.factor, c), self.field)

    def solve(self, b: Sequence):
        """``A^-1 b`` from the maintained factor; ``None`` while singular."""
        if self.factor is None:
            return None
        if self.field.exact:
            return [self.field.sum(a * x for a, x in zip(r, b)) for r in self.factor]
        return _backward(self.factor, _forward(self.factor, b))


def _exact_inverse(rows):
    inv = inverse(Matrix(rows, EXACT, ncols=len(rows)))
    return inv.rows


# ---------------------------------------------------------------------------
# Gram state


@dataclass(frozen=True)
class GramState:
    """Bordered Gram matrix of the first ``n`` columns plus two determinant trackers.

    ``full`` tracks all rows, ``reduced`` all rows except ``drop``. With
    ``shift == 1`` both matrices carry an added identity.
    """

    n: int
    drop: int
    shift: int
    full: DetTracker
    reduced: DetTracker
    field: Field
    reanchor: int = REANCHOR_DEFAULT
    since_anchor: int = 0

    @property
    def det_full(self):
        return self.full.det

    @property
    def det_reduced(self):
        return self.reduced.det

    @property
    def B(self) -> SymMatrix:
        return SymMatrix(self.full.rows, self.field, positive=True, ncols=self.full.order)

    @property
    def keep(self) -> list[int]:
        return [r for r in range(self.full.order) if r != self.drop]

    def minimizer(self):
        """Coefficients of ``f_drop`` on the kept rows (shifted problem when ``shift == 1``)."""
        b = [self.full.rows[self.drop][r] for r in self.keep]
        t = self.reduced.solve(b)
        if t is None:
            t = solve(Matrix(self.reduced.rows, self.field, ncols=self.reduced.order), b)
        return t


def _base_rows(size: int, shift: int, field: Field):
    one, zero = field.coerce(shift), field.coerce(0)
    return [[one if i == j else zero for j in range(size)] for i in range(size)]


def initial_state(family: VectorFamily, drop: int = 0, *, field: Field = EXACT, shift: int = 0,
                  reanchor: int = REANCHOR_DEFAULT) -> GramState:
    size = family.m_plus_1
    if not 0 <= drop < size:
        raise InvalidInputError(f"drop index {drop} outside 0..{size - 1}")
    return GramState(
        n=0,
        drop=drop,
        shift=shift,
        full=DetTracker.anchored(_base_rows(size, shift, field), field),
        reduced=DetTracker.anchored(_base_rows(size - 1, shift, field), field),
        field=field,
        reanchor=reanchor,
    )


def batch_gram(family: VectorFamily, n: int, field: Field, shift: int = 0) -> SymMatrix:
    """Gram matrix of the projections built from scratch (plus ``shift * I``)."""
    G = gram_matrix(family.projection(n), field) if n > 0 else SymMatrix(
        _base_rows(family.m_plus_1, 0, field), field, positive=True)
    if not shift:
        return G
    rows = [list(r) for r in G.rows]
    for i in range(len(rows)):
        rows[i][i] += shift
    return SymMatrix(rows, field, positive=True)


def _reanchored(state: GramState, family: VectorFamily, n: int) -> tuple[DetTracker, DetTracker]:
    field = state.field
    if field.exact:
        rows = state.full.rows  # exact accumulation needs no refresh
    else:
        rows = batch_gram(family, n, field, state.shift).rows
    keep = state.keep
    red = [[rows[i][j] for j in keep] for i in keep]
    return DetTracker.anchored(rows, field), DetTracker.anchored(red, field)


def advance(state: GramState, family: VectorFamily) -> GramState:
    """Append column ``n + 1`` of ``family`` to the state."""
    k = state.n + 1
    h = family.horizon
    if h is not None and k > h:
        raise HorizonError(f"column {k} beyond family horizon {h}")
    field = state.field
    c = [field.coerce(x) for x in family.column(k)]
    c_red = [c[r] for r in state.keep]
    full = state.full.update(c)
    reduced = state.reduced.update(c_red)
    since = state.since_anchor + 1
    new = replace(state, n=k, full=full, reduced=reduced, since_anchor=since)
    if state.reanchor and since >= state.reanchor:
        full, reduced = _reanchored(new, family, k)
        new = replace(new, full=full, reduced=reduced, since_anchor=0)
    return new


def run_states(family: VectorFamily, n_max: int, drop: int = 0, *, field: Field = EXACT, shift: int = 0,
               reanchor: int = REANCHOR_DEFAULT) -> Iterable[GramState]:
    state = initial_state(family, drop, field=field, shift=shift, reanchor=reanchor)
    for _ in range(n_max):
        state = advance(state, family)
        yield state


# ---------------------------------------------------------------------------
# ratio series


@dataclass(frozen=True)
class SeriesEntry:
    n: int
    value: object  # R_n
    numerator: object
    denominator: object
    t0_norm_sq: object
    wallclock: float

    @property
    def t0_norm(self) -> float:
        return math.sqrt(float(self.t0_norm_sq))


@dataclass(frozen=True)
class RatioSeries:
    family: dict
    drop_index: int
    shifted: bool
    mode: str
    entries: tuple[SeriesEntry, ...]
    flagged: tuple[int, ...] = ()

    def values(self) -> list:
        return [e.value for e in self.entries]

    def at(self, n: int) -> SeriesEntry:
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)

    def monotonicity_violations(self, field: Field | None = None) -> list[int]:
        """Indices ``n`` with ``R_n < R_{n-1}``."""
        le = (field or (EXACT if self.mode == "exact" else FLOAT)).le
        return [b.n for a, b in zip(self.entries, self.entries[1:]) if not le(a.value, b.value)]

    def first_exceeding(self, threshold) -> int | None:
        for e in self.entries:
            if e.value > threshold:
                return e.n
        return None


def _check_series_args(family: VectorFamily, n_max: int, drop_index: int) -> None:
    if not 0 <= drop_index <= family.m:
        raise InvalidInputError(f"drop index {drop_index} outside 0..{family.m}")
    if n_max < 1:
        raise InvalidInputError(f"n_max must be positive, got {n_max}")
    h = family.horizon
    if h is not None and n_max > h:
        raise HorizonError(f"n_max {n_max} beyond family horizon {h}")


def _series(family, n_max, drop_index, field, reanchor, shift) -> RatioSeries:
    _check_series_args(family, n_max, drop_index)
    if field is None:
        field = auto_field(family, n_max)
    start = 1 if shift else family.m_plus_1
    entries = []
    flagged = []
    t_start = time.perf_counter()
    last_zero = False
    for state in run_states(family, n_max, drop_index, field=field, shift=shift, reanchor=reanchor):
        if state.n < start:
            continue
        den = state.det_reduced
        if field.is_zero(den):
            flagged.append(state.n)
            last_zero = True
            continue
        last_zero = False
        t0 = state.minimizer()
        norm_sq = field.sum(x * x for x in t0)
        entries.append(SeriesEntry(state.n, state.det_full / den, state.det_full, den, norm_sq,
                                   time.perf_counter() - t_start))
    if last_zero:
        raise DegeneracyError(
            f"Gram determinant without row {drop_index} is zero through n = {n_max}: "
            "the remaining rows are linearly dependent"
        )
    return RatioSeries(family.describe(), drop_index, bool(shift), field.name, tuple(entries), tuple(flagged))


def ratio_series(family: VectorFamily, n_max: int, drop_index: int = 0, *, field: Field | None = None,
                 reanchor: int = REANCHOR_DEFAULT) -> RatioSeries:
    """``R_n = Gamma(f_0..f_m)^(n) / Gamma(f_0..f_m without f_s)^(n)`` for ``n = m+1..n_max``.

    Zero denominators are flagged and skipped; a denominator still zero at
    ``n_max`` raises DegeneracyError.
    """
    if n_max < family.m_plus_1:
        raise InvalidInputError(f"n_max must be at least m + 1 = {family.m_plus_1}")
    return _series(family, n_max, drop_index, field, reanchor, shift=0)


def shifted_ratio_series(family: VectorFamily, n_max: int, drop_index: int = 0, *, field: Field | None = None,
                         reanchor: int = REANCHOR_DEFAULT) -> RatioSeries:
    """``det(I + gram(all rows)) / det(I + gram(rows without s))`` for ``n = 1..n_max``."""
    return _series(family, n_max, drop_index, field, reanchor, shift=1)


# ---------------------------------------------------------------------------
# boundedness monitor


@dataclass(frozen=True)
class BoundRow:
    n: int
    cofactors: tuple  # t_rr = A^r_r(B), t_rs = -A^r_s(B)
    t0: tuple
    t0_norm_sq: object
    observed_c: tuple  # Gamma(all but s) / Gamma(f_1..f_m), s = 1..m
    envelope: object  # sum of observed_c
    cauchy_schwarz_ok: bool
    envelope_ok: bool
    flagged: bool = False

    @property
    def ok(self) -> bool:
        return self.flagged or (self.cauchy_schwarz_ok and self.envelope_ok)


@dataclass(frozen=True)
class BoundednessReport:
    family: dict
    mode: str
    rows: tuple[BoundRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def flagged(self) -> list[int]:
        return [r.n for r in self.rows if r.flagged]

    def max_t0_norm(self) -> float:
        return max((math.sqrt(float(r.t0_norm_sq)) for r in self.rows if not r.flagged), default=0.0)


def cofactor_table(B) -> tuple:
    """``t_rr = A^r_r(B)`` and ``t_rs = -A^r_s(B)`` for ``r != s``."""
    size = B.nrows
    return tuple(
        tuple(cofactor(B, r, s) if r == s else -cofactor(B, r, s) for s in range(size)) for r in range(size)
    )


def bound_row(n: int, B, field: Field) -> BoundRow:
    t = cofactor_table(B)
    size = len(t)
    t00 = t[0][0]
    cs_ok = all(field.le(t[r][s] * t[r][s], t[r][r] * t[s][s]) for r in range(size) for s in range(r + 1, size))
    if field.is_zero(t00):
        return BoundRow(n, t, (), None, (), None, cs_ok, True, flagged=True)
    t0 = tuple(t[0][s] / t00 for s in range(1, size))
    norm_sq = field.sum(x * x for x in t0)
    observed = tuple(t[s][s] / t00 for s in range(1, size))
    envelope = field.sum(observed)
    return BoundRow(n, t, t0, norm_sq, observed, envelope, cs_ok, field.le(norm_sq, envelope))


def boundedness_report(family: VectorFamily, n_max: int, *, sample: Iterable[int] | None = None,
                       field: Field | None = None, reanchor: int = REANCHOR_DEFAULT) -> BoundednessReport:
    """Cofactor table, minimizer and the cofactor and envelope inequalities at each sampled ``n``.

    Rows with a singular ``Gamma(f_1..f_m)`` are flagged and skipped.
    """
    _check_series_args(family, n_max, 0)
    if field is None:
        field = auto_field(family, n_max)
    start = family.m_plus_1
    wanted = set(range(start, n_max + 1)) if sample is None else {n for n in sample if start <= n <= n_max}
    rows = []
    for state in run_states(family, n_max, 0, field=field, reanchor=reanchor):
        if state.n in wanted:
            rows.append(bound_row(state.n, state.B, field))
    return BoundednessReport(family.describe(), field.name, tuple(rows))


# ---------------------------------------------------------------------------
# l2-escape probe


def geometric_checkpoints(n: int) -> list[int]:
    pts = []
    k = 1
    while k < n:
        pts.append(k)
        k *= 2
    pts.append(n)
    return pts


def partial_sums(family: VectorFamily, coeffs: Sequence, checkpoints: Sequence[int], field: Field = FLOAT) -> list:
    """``sum_{k <= n} (sum_r C_r f_rk)^2`` at each checkpoint ``n``."""
    coeffs = [field.coerce(x) for x in coeffs]
    if len(coeffs) != family.m_plus_1:
        raise InvalidInputError(f"{len(coeffs)} coefficients for {family.m_plus_1} rows")
    out = []
    terms = []
    marks = sorted(set(checkpoints))
    k = 0
    for n in marks:
        while k < n:
            k += 1
            v = field.sum(c * field.coerce(x) for c, x in zip(coeffs, family.column(k)))
            terms.append(v * v)
        out.append(field.sum(terms))
    return out


@dataclass(frozen=True)
class ProbeDirection:
    label: str
    coeffs: tuple
    checkpoints: tuple
    sums: tuple
    growth_exponent: float | None
    bounded_looking: bool


@dataclass(frozen=True)
class ProbeReport:
    family: dict
    n_probe: int
    directions: tuple[ProbeDirection, ...]
    heuristic: bool = True
    note: str = ("heuristic: finite partial sums suggest, but cannot establish, "
                 "that no combination of the rows is square-summable")

    @property
    def flagged(self) -> list[ProbeDirection]:
        return [d for d in self.directions if d.bounded_looking]


def _growth(checkpoints, sums) -> float | None:
    pts = [(math.log(n), math.log(s)) for n, s in zip(checkpoints, sums) if s > 0 and n > 0]
    pts = pts[len(pts) // 2:]
    if len(pts) < 2:
        return None
    xs, ys = zip(*pts)
    if len(set(xs)) < 2:
        return None
    return statistics.linear_regression(xs, ys).slope


def _probe_direction(family, label, coeffs, checkpoints, growth_tol) -> ProbeDirection:
    sums = partial_sums(family, coeffs, checkpoints, FLOAT)
    last = sums[-1]
    prev = sums[-2] if len(sums) > 1 else 0.0
    bounded = last <= FLOAT.abs_tol or last <= prev * (1 + growth_tol)
    return ProbeDirection(label, tuple(float(c) for c in coeffs), tuple(checkpoints), tuple(sums),
                          _growth(checkpoints, sums), bounded)


def l2_escape_probe(family: VectorFamily, coeff_samples: int, n_probe: int, *, seed: int = 0,
                    growth_tol: float = 1e-3) -> ProbeReport:
    """Partial sums of squared row combinations along sampled unit directions.

    Besides ``coeff_samples`` seeded random directions, the direction
    ``(1, -t0)`` of the least-squares residual of ``f_0`` at ``n_probe`` is
    probed; it is the combination closest to square-summable among those
    with ``C_0 = 1``. A direction is flagged when its partial sum stops
    growing over the last checkpoint interval.
    """
    if coeff_samples < 1:
        raise InvalidInputError("coeff_samples must be at least 1")
    _check_series_args(family, n_probe, 0)
    rng = random.Random(seed)
    checkpoints = geometric_checkpoints(n_probe)
    size = family.m_plus_1
    directions = []
    for i in range(coeff_samples):
        v = [rng.gauss(0.0, 1.0) for _ in range(size)]
        norm = math.sqrt(math.fsum(x * x for x in v)) or 1.0
        directions.append(_probe_direction(family, f"random-{i}", [x / norm for x in v], checkpoints, growth_tol))
    if size > 1:
        B = batch_gram(family, n_probe, FLOAT)
        try:
            t0 = minimizer_from_bordered(B)
        except ArithmeticError:
            t0 = None
        if t0 is not None:
            v = [1.0] + [-x for x in t0]
            norm = math.sqrt(math.fsum(x * x for x in v))
            directions.append(_probe_direction(family, "residual", [x / norm for x in v], checkpoints, growth_tol))
    return ProbeReport(family.describe(), n_probe, tuple(directions))
