"""Vector families ``f_r = (f_rk)``, rows ``r = 0..m`` and columns ``k = 1, 2, ...``.

Entries are returned as native numbers (int, Fraction or float); callers
coerce them into their scalar backend.
"""
from __future__ import annotations

import ast
import csv
import math
import operator
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .errors import FamilyFormatError, HorizonError, InvalidInputError
from .scalar import EXACT, Field


class VectorFamily:
    """Base class; subclasses implement :meth:`entry`."""

    kind = "abstract"
    integral = False  # every entry is an integer

    def __init__(self, m_plus_1: int, label: str = ""):
        if m_plus_1 < 1:
            raise InvalidInputError("a family needs at least one row")
        self.m_plus_1 = m_plus_1
        self.label = label or self.kind

    @property
    def m(self) -> int:
        return self.m_plus_1 - 1

    @property
    def horizon(self) -> int | None:
        """Number of defined columns; ``None`` when unbounded."""
        return None

    def entry(self, r: int, k: int):
        raise NotImplementedError

    def _check(self, r: int, k: int) -> None:
        if not 0 <= r < self.m_plus_1:
            raise IndexError(f"row {r} outside 0..{self.m}")
        if k < 1:
            raise IndexError(f"column index {k} must be >= 1")
        h = self.horizon
        if h is not None and k > h:
            raise HorizonError(f"column {k} beyond family horizon {h}")

    def column(self, k: int) -> tuple:
        return tuple(self.entry(r, k) for r in range(self.m_plus_1))

    def projection(self, n: int, rows: Sequence[int] | None = None) -> list[list]:
        """Truncations ``f_r^(n)`` of the selected rows to their first ``n`` entries."""
        rows = range(self.m_plus_1) if rows is None else rows
        return [[self.entry(r, k) for k in range(1, n + 1)] for r in rows]

    def describe(self) -> dict:
        return {"kind": self.kind, "m": self.m, "label": self.label}


class MonomialFamily(VectorFamily):
    """``f_rk = k^r``."""

    kind = "monomial"
    integral = True

    def __init__(self, m: int, label: str = ""):
        if m < 0:
            raise InvalidInputError(f"m must be nonnegative, got {m}")
        super().__init__(m + 1, label)

    def entry(self, r, k):
        self._check(r, k)
        return k ** r


class LogPowerFamily(VectorFamily):
    """``f_rk = log(k + 1)^r`` (binary64 values)."""

    kind = "logpower"

    def __init__(self, m: int, label: str = ""):
        if m < 0:
            raise InvalidInputError(f"m must be nonnegative, got {m}")
        super().__init__(m + 1, label)

    def entry(self, r, k):
        self._check(r, k)
        return math.log(k + 1) ** r


class ZeroFamily(VectorFamily):
    kind = "zero"
    integral = True

    def __init__(self, m: int, label: str = ""):
        super().__init__(m + 1, label)

    def entry(self, r, k):
        self._check(r, k)
        return 0


class CsvFamily(VectorFamily):
    """A finite table, optionally continued past its width by another family."""

    kind = "csv"

    def __init__(self, table: Sequence[Sequence], label: str = "", pad: VectorFamily | None = None):
        if not table or not table[0]:
            raise FamilyFormatError("empty table")
        width = len(table[0])
        for i, row in enumerate(table):
            if len(row) != width:
                raise FamilyFormatError(
                    f"ragged table: row {i + 1} has {len(row)} cells, expected {width}", row=i + 1
                )
        if pad is not None and pad.m_plus_1 != len(table):
            raise InvalidInputError(f"pad family has {pad.m_plus_1} rows, table has {len(table)}")
        super().__init__(len(table), label)
        self.table = tuple(tuple(r) for r in table)
        self.width = width
        self.pad = pad
        self.integral = all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
                            for r in self.table for x in r) and (pad is None or pad.integral)

    @property
    def horizon(self):
        if self.pad is None:
            return self.width
        h = self.pad.horizon
        return None if h is None else self.width + h

    def entry(self, r, k):
        self._check(r, k)
        if k <= self.width:
            return self.table[r][k - 1]
        return self.pad.entry(r, k - self.width)

    def describe(self) -> dict:
        d = super().describe()
        d["width"] = self.width
        if self.pad is not None:
            d["pad"] = self.pad.describe()
        return d


class CustomFamily(VectorFamily):
    """Rows given by arithmetic expressions in ``k``.

    Supported: integer and decimal literals, ``+ - * / **``, unary minus,
    and the functions ``log``, ``sqrt``, ``exp``, ``abs``. Integer
    arithmetic stays exact (``/`` yields a Fraction); the transcendental
    functions return floats.
    """

    kind = "custom"

    def __init__(self, expressions: Sequence[str], label: str = ""):
        if not expressions:
            raise FamilyFormatError("no row expressions given")
        super().__init__(len(expressions), label)
        self.expressions = tuple(expressions)
        self._rules: list[Callable[[int], object]] = []
        for i, src in enumerate(self.expressions):
            try:
                self._rules.append(compile_rule(src))
            except (SyntaxError, ValueError) as exc:
                raise FamilyFormatError(f"row {i + 1}: cannot parse {src!r}: {exc}", row=i + 1) from None

    def entry(self, r, k):
        self._check(r, k)
        return self._rules[r](k)

    def describe(self) -> dict:
        d = super().describe()
        d["rows"] = list(self.expressions)
        return d


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Pow: operator.pow,
}
_FUNCS = {"log": math.log, "sqrt": math.sqrt, "exp": math.exp, "abs": abs}


def _div(a, b):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) / Fraction(b)
    return a / b


def compile_rule(src: str) -> Callable[[int], object]:
    tree = ast.parse(src.strip(), mode="eval")

    def ev(node, k):
        if isinstance(node, ast.Expression):
            return ev(node.body, k)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "k":
                return k
            raise ValueError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, k)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left, k), ev(node.right, k)
            if isinstance(node.op, ast.Div):
                return _div(a, b)
            op = _BINOPS.get(type(node.op))
            if op is None:
                raise ValueError(f"operator {type(node.op).__name__} not allowed")
            return op(a, b)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
            return _FUNCS[node.func.id](ev(node.args[0], k))
        raise ValueError(f"unsupported syntax {type(node).__name__}")

    ev(tree, 1)  # surface unsupported syntax at load time
    return lambda k: ev(tree, k)


# ---------------------------------------------------------------------------
# file formats


def _data_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _parse_cell(cell: str, field: Field):
    cell = cell.strip()
    if field.exact:
        value = Fraction(cell)
        return value.numerator if value.denominator == 1 else value
    return field.coerce(cell)


def _is_number(cell: str) -> bool:
    try:
        Fraction(cell.strip())
    except (ValueError, ZeroDivisionError):
        return False
    return True


def ingest_csv(path, field: Field = EXACT, pad: VectorFamily | None = None, label: str | None = None) -> CsvFamily:
    """Read a family table: one row per vector ``f_r``, ``#`` comments, optional header."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    rows = list(csv.reader(_data_lines(text)))
    if rows and not any(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise FamilyFormatError(f"{path}: no data rows")
    width = len(rows[0])
    table = []
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise FamilyFormatError(f"{path}: ragged table, row {i} has {len(row)} cells, expected {width}", row=i)
        parsed = []
        for j, cell in enumerate(row, start=1):
            try:
                parsed.append(_parse_cell(cell, field))
            except (ValueError, ZeroDivisionError):
                raise FamilyFormatError(
                    f"{path}: non-numeric cell {cell.strip()!r} at row {i}, column {j}", row=i, col=j
                ) from None
        table.append(parsed)
    return CsvFamily(table, label=label or path.name, pad=pad)


def load_custom(path, label: str | None = None) -> CustomFamily:
    """One expression per line, row ``r`` on the ``r``-th data line."""
    path = Path(path)
    return CustomFamily(_data_lines(path.read_text(encoding="utf-8")), label=label or path.name)


def make_family(kind: str, m: int | None = None, *, csv_path=None, custom_path=None,
                pad: str | None = None, field: Field = EXACT) -> VectorFamily:
    if kind == "monomial":
        return MonomialFamily(_require_m(m))
    if kind == "logpower":
        return LogPowerFamily(_require_m(m))
    if kind == "zero":
        return ZeroFamily(_require_m(m))
    if kind == "csv":
        if csv_path is None:
            raise InvalidInputError("csv family needs a table path")
        fam = ingest_csv(csv_path, field)
        if pad:
            fam = CsvFamily(fam.table, fam.label, pad=make_family(pad, fam.m, field=field))
        return fam
    if kind == "custom":
        if custom_path is None:
            raise InvalidInputError("custom family needs a rule file")
        return load_custom(custom_path)
    raise InvalidInputError(f"unknown family kind {kind!r}")


def _require_m(m):
    if m is None:
        raise InvalidInputError("family needs --m")
    if m < 0:
        raise InvalidInputError(f"m must be nonnegative, got {m}")
    return m
