"""Scalar backends: exact rationals and binary64 floats.

Every matrix carries one of these objects; all arithmetic-sensitive
decisions (zero tests, equality, square roots, summation) go through it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Scalar = Union[Fraction, float]


class ExactRational:
    """Arbitrary-precision rationals backed by :class:`fractions.Fraction`."""

    name = "exact"
    exact = True

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, bool):
            return Fraction(int(x))
        if isinstance(x, (int, Rational)):
            return Fraction(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite value {x!r} has no exact representation")
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x.strip())
        raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")

    def is_zero(self, x) -> bool:
        return x == 0

    def eq(self, a, b) -> bool:
        return a == b

    def le(self, a, b) -> bool:
        return a <= b

    def sum(self, values: Iterable) -> Fraction:
        return sum(values, Fraction(0))

    def sqrt(self, x) -> Fraction:
        """Exact square root; only perfect squares of rationals qualify."""
        x = self.coerce(x)
        if x < 0:
            raise ValueError(f"square root of negative value {x}")
        p = math.isqrt(x.numerator)
        q = math.isqrt(x.denominator)
        if p * p != x.numerator or q * q != x.denominator:
            raise ValueError(f"{x} is not the square of a rational")
        return Fraction(p, q)

    def to_float(self, x) -> float:
        return float(x)

    def __repr__(self) -> str:
        return "ExactRational()"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactRational)

    def __hash__(self) -> int:
        return hash("exact")


@dataclass(frozen=True)
class Float64:
    """binary64 arithmetic with a relative tolerance and an absolute floor.

    ``abs_tol`` doubles as the singularity threshold for pivots.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12

    name = "float"
    exact = False

    def coerce(self, x) -> float:
        if isinstance(x, str):
            x = x.strip()
            return float(Fraction(x)) if "/" in x else float(x)
        return float(x)

    def is_zero(self, x) -> bool:
        return abs(x) < self.abs_tol

    def eq(self, a, b) -> bool:
        return math.isclose(a, b, rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def le(self, a, b) -> bool:
        return a <= b or self.eq(a, b)

    def sum(self, values: Iterable) -> float:
        # fsum is exactly rounded, so the result is independent of grouping
        return math.fsum(values)

    def sqrt(self, x) -> float:
        return math.sqrt(x)

    def to_float(self, x) -> float:
        return float(x)


EXACT = ExactRational()
FLOAT = Float64()

Field = Union[ExactRational, Float64]


def infer_field(values: Iterable) -> Field:
    """FLOAT if any value is a float, EXACT otherwise."""
    for v in values:
        if isinstance(v, float):
            return FLOAT
    return EXACT


def field_for_mode(mode: str, rel_tol: float | None = None, abs_tol: float | None = None) -> Field:
    if mode == "exact":
        return EXACT
    if mode == "float":
        return Float64(
            rel_tol=FLOAT.rel_tol if rel_tol is None else rel_tol,
            abs_tol=FLOAT.abs_tol if abs_tol is None else abs_tol,
        )
    raise ValueError(f"unknown scalar mode {mode!r}")
