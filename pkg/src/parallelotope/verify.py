"""Randomized identity suites over seeded integer instances.

Each suite checks one identity against an independent route (a
different solver, a brute-force enumeration or a defining property) and
collects a message for every failing instance.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .charpoly import (
    cauchy_binet_check,
    delta_identity_check,
    gen_charpoly_direct,
    gen_charpoly_subset,
    inverse_lambda,
    quadform_lambda,
    shifted,
)
from .distance import (
    constrained_min,
    constrained_min_diagonal,
    distance_squared,
    minimizer_cramer,
    residual_inner_products,
)
from .matrix import Matrix, determinant, dot, gram_matrix, solve, spd_solve
from .scalar import EXACT


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _ivec(rng: random.Random, n: int, lo: int = -5, hi: int = 5) -> list[int]:
    return [rng.randint(lo, hi) for _ in range(n)]


def _independent_basis(rng, m, n, lo=-5, hi=5):
    while True:
        basis = [_ivec(rng, n, lo, hi) for _ in range(m)]
        if determinant(gram_matrix(basis, EXACT)) != 0:
            return basis


def _spd(rng, order, lo=-3, hi=3):
    """Gram matrix of ``order`` vectors plus the identity: SPD with integer entries."""
    width = order + rng.randint(0, 2)
    vecs = [_ivec(rng, width, lo, hi) for _ in range(order)]
    G = gram_matrix(vecs, EXACT)
    return shifted(G, [1] * order)


def suite_distance(rng, count, max_order=8) -> SuiteResult:
    """Gram ratio against ``(f0, f0) - (A^-1 b, b)``, and residual orthogonality."""
    res = SuiteResult("distance")
    for i in range(count):
        n = rng.randint(1, max_order)
        m = rng.randint(1, min(5, n))
        basis = _independent_basis(rng, m, n)
        f0 = _ivec(rng, n)
        d = distance_squared(f0, basis, field=EXACT, cross_check=False)
        A = gram_matrix(basis, EXACT)
        b = [dot(v, f0, EXACT) for v in basis]
        t = solve(A, b)
        normal = dot(f0, f0, EXACT) - dot(t, b, EXACT)
        if d.d_squared != normal:
            res.failures.append(f"#{i}: ratio {d.d_squared} != normal {normal}")
        if d.d_squared * d.denominator != d.numerator:
            res.failures.append(f"#{i}: ratio does not reproduce the Gram determinant")
        if any(x != 0 for x in residual_inner_products(f0, basis, d.minimizer, EXACT)):
            res.failures.append(f"#{i}: residual not orthogonal to the basis")
        res.instances += 1
    return res


def suite_cramer(rng, count, max_order=8) -> SuiteResult:
    res = SuiteResult("cramer")
    for i in range(count):
        n = rng.randint(1, max_order)
        m = rng.randint(1, min(6, n))
        basis = _independent_basis(rng, m, n)
        f0 = _ivec(rng, n)
        t_cramer = list(minimizer_cramer(f0, basis, field=EXACT))
        A = gram_matrix(basis, EXACT)
        t_solve = spd_solve(A, [dot(v, f0, EXACT) for v in basis])
        if t_cramer != t_solve:
            res.failures.append(f"#{i}: cramer {t_cramer} != solve {t_solve}")
        res.instances += 1
    return res


def suite_charpoly(rng, count, max_order=8) -> SuiteResult:
    res = SuiteResult("charpoly")
    for i in range(count):
        n = rng.randint(1, max_order)
        C = Matrix([_ivec(rng, n) for _ in range(n)], EXACT)
        lam = _ivec(rng, n, -3, 6)
        direct = gen_charpoly_direct(C, lam)
        subset = gen_charpoly_subset(C, lam)
        if direct != subset:
            res.failures.append(f"#{i}: subset {subset} != direct {direct}")
        res.instances += 1
    return res


def suite_inverse(rng, count, max_order=6) -> SuiteResult:
    res = SuiteResult("inverse")
    for i in range(count):
        n = rng.randint(1, min(6, max_order))
        vecs = [_ivec(rng, rng.randint(1, n + 1), -3, 3) for _ in range(n)]
        width = max(len(v) for v in vecs)
        C = gram_matrix([v + [0] * (width - len(v)) for v in vecs], EXACT)
        lam = [Fraction(rng.randint(1, 6), rng.randint(1, 3)) for _ in range(n)]
        a = _ivec(rng, n)
        Cl = shifted(C, lam)
        inv = inverse_lambda(C, lam)
        if inv @ Cl != Matrix.identity(n, EXACT):
            res.failures.append(f"#{i}: inverse_lambda * C(lam) != I")
        q = quadform_lambda(C, lam, a)
        direct = dot(spd_solve(Cl, a), a, EXACT)
        if q != direct:
            res.failures.append(f"#{i}: quadform {q} != solve {direct}")
        res.instances += 1
    return res


def suite_delta(rng, count, max_order=6) -> SuiteResult:
    res = SuiteResult("delta")
    for i in range(count):
        m = rng.randint(2, 4)
        n = rng.randint(1, min(6, max_order))
        A = Matrix([_ivec(rng, n, -4, 4) for _ in range(m)], EXACT)
        lam = [Fraction(rng.randint(1, 4), rng.randint(1, 3)) ** 2 for _ in range(n)]
        chk = delta_identity_check(A, lam)
        if not chk.equal:
            res.failures.append(f"#{i}: lhs {chk.lhs} != rhs {chk.rhs}")
        res.instances += 1
    return res


def suite_cauchy_binet(rng, count, max_order=7) -> SuiteResult:
    res = SuiteResult("cauchy_binet")
    for i in range(count):
        m = rng.randint(1, 4)
        n = rng.randint(1, min(7, max_order))
        X = Matrix([_ivec(rng, n) for _ in range(m)], EXACT)
        r = rng.randint(0, min(m, n))
        alpha = tuple(sorted(rng.sample(range(n), r)))
        chk = cauchy_binet_check(X, alpha)
        if not chk.equal:
            res.failures.append(f"#{i}: gram {chk.gram_det} != minors {chk.minor_sum}")
        res.instances += 1
    return res


def _feasible_values(rng, A, b, probes):
    """``(A x, x)`` at random rational ``x`` with ``(x, b) = 1``.

    ``x = y + (p/q) b`` for an integer point ``y``, with ``p/q`` the shift
    that lands it on the hyperplane; everything stays in integers until
    the final quotient.
    """
    Ai = [[int(x) for x in r] for r in A.rows]
    n = len(b)
    Ab = [sum(r[j] * b[j] for j in range(n)) for r in Ai]
    bAb = sum(x * y for x, y in zip(Ab, b))
    q = sum(x * x for x in b)
    for _ in range(probes):
        y = _ivec(rng, n, -20, 20)
        p = q - sum(x * z for x, z in zip(y, b))  # s = p / q
        yAy = sum(y[i] * sum(Ai[i][j] * y[j] for j in range(n)) for i in range(n))
        Aby = sum(x * z for x, z in zip(Ab, y))
        yield Fraction(yAy * q * q + 2 * p * q * Aby + p * p * bAb, q * q)


def suite_constrained(rng, count, max_order=5, probes=1000) -> SuiteResult:
    """Constrained minimum is a lower bound on feasible points; diagonal closed forms match."""
    res = SuiteResult("constrained")
    for i in range(count):
        n = rng.randint(1, min(5, max_order))
        A = _spd(rng, n)
        b = _ivec(rng, n)
        if not any(b):
            b[0] = 1
        cm = constrained_min(A, b)
        if dot(A @ list(cm.argmin), cm.argmin, EXACT) != cm.value:
            res.failures.append(f"#{i}: value is not attained at argmin")
        if any(v < cm.value for v in _feasible_values(rng, A, b, probes)):
            res.failures.append(f"#{i}: feasible point below the minimum")
        a = [rng.randint(1, 9) for _ in range(n)]
        D = Matrix.diag(a, EXACT)
        if constrained_min(D, [1] * n) != constrained_min_diagonal(a):
            res.failures.append(f"#{i}: sum-to-one closed form mismatch")
        if constrained_min(D, b) != constrained_min_diagonal(a, b):
            res.failures.append(f"#{i}: weighted closed form mismatch")
        res.instances += 1
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "distance": suite_distance,
    "cramer": suite_cramer,
    "charpoly": suite_charpoly,
    "inverse": suite_inverse,
    "delta": suite_delta,
    "cauchy_binet": suite_cauchy_binet,
    "constrained": suite_constrained,
}


def run_suites(seed: int = 0, instances: int = 50, max_order: int | None = None,
               names=None) -> list[SuiteResult]:
    """Run the named suites (all by default); each gets its own seeded stream."""
    out = []
    for name in names or SUITES:
        rng = random.Random(f"{seed}:{name}")
        kwargs = {} if max_order is None else {"max_order": max_order}
        out.append(SUITES[name](rng, instances, **kwargs))
    return out
