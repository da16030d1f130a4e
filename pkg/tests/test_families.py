import math
from fractions import Fraction

import pytest

from parallelotope.errors import FamilyFormatError, HorizonError, InvalidInputError
from parallelotope.families import (
    CsvFamily,
    CustomFamily,
    LogPowerFamily,
    MonomialFamily,
    ZeroFamily,
    compile_rule,
    ingest_csv,
    load_custom,
    make_family,
)
from parallelotope.scalar import FLOAT


def test_monomial_entries():
    f = MonomialFamily(2)
    assert f.m == 2 and f.horizon is None and f.integral
    assert f.projection(3) == [[1, 1, 1], [1, 2, 3], [1, 4, 9]]
    assert f.column(2) == (1, 2, 4)


def test_logpower_entries():
    f = LogPowerFamily(1)
    assert f.entry(1, 1) == pytest.approx(math.log(2))
    assert f.entry(0, 5) == 1.0


def test_zero_family():
    assert ZeroFamily(1).projection(2) == [[0, 0], [0, 0]]


def test_bad_indices():
    f = MonomialFamily(1)
    with pytest.raises(IndexError):
        f.entry(2, 1)
    with pytest.raises(IndexError):
        f.entry(0, 0)
    with pytest.raises(InvalidInputError):
        MonomialFamily(-1)


def test_csv_2x3(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# two rows\n1,2,3\n4,5,6\n")
    f = ingest_csv(p)
    assert f.m == 1 and f.horizon == 3
    assert f.projection(3) == [[1, 2, 3], [4, 5, 6]]
    with pytest.raises(HorizonError):
        f.entry(0, 4)


def test_csv_header_and_blank_lines(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b\n\n1,2\n# note\n3,4\n")
    assert ingest_csv(p).table == ((1, 2), (3, 4))


def test_csv_ragged_names_row_two(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1,2,3\n4,5\n")
    with pytest.raises(FamilyFormatError) as exc:
        ingest_csv(p)
    assert exc.value.row == 2
    assert "row 2" in str(exc.value)


def test_csv_non_numeric_cell(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1,2\n3,x\n")
    with pytest.raises(FamilyFormatError) as exc:
        ingest_csv(p)
    assert (exc.value.row, exc.value.col) == (2, 2)


def test_csv_rational_round_trip(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1/3,1\n2,-5/7\n")
    f = ingest_csv(p)
    assert f.entry(0, 1) == Fraction(1, 3)
    q = tmp_path / "again.csv"
    q.write_text("\n".join(",".join(str(x) for x in row) for row in f.table))
    assert ingest_csv(q).table == f.table


def test_csv_float_mode(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0.1,2\n")
    assert ingest_csv(p, FLOAT).entry(0, 1) == 0.1


def test_csv_padding():
    f = CsvFamily([[1, 2], [3, 4]], pad=MonomialFamily(1))
    assert f.horizon is None
    assert f.projection(4) == [[1, 2, 1, 1], [3, 4, 1, 2]]
    with pytest.raises(InvalidInputError):
        CsvFamily([[1, 2], [3, 4]], pad=MonomialFamily(2))


def test_custom_rules():
    f = CustomFamily(["1", "k", "k**2 / 2", "-log(k)"])
    assert f.entry(2, 3) == Fraction(9, 2)
    assert f.entry(3, 1) == 0.0
    assert f.entry(1, 7) == 7


@pytest.mark.parametrize("src", ["__import__('os')", "k.real", "[k]", "q + 1", "k if k else 1"])
def test_custom_rejects_unsafe(src):
    with pytest.raises((ValueError, SyntaxError)):
        compile_rule(src)


def test_custom_family_reports_row():
    with pytest.raises(FamilyFormatError) as exc:
        CustomFamily(["k", "open(k)"])
    assert exc.value.row == 2


def test_load_custom(tmp_path):
    p = tmp_path / "rules.txt"
    p.write_text("# rows\n1\nk + 1\n")
    assert load_custom(p).projection(2) == [[1, 1], [2, 3]]


def test_make_family(tmp_path):
    assert isinstance(make_family("monomial", 2), MonomialFamily)
    p = tmp_path / "t.csv"
    p.write_text("1,2\n3,4\n")
    f = make_family("csv", csv_path=p, pad="monomial")
    assert f.horizon is None and f.entry(1, 3) == 1
    with pytest.raises(InvalidInputError):
        make_family("monomial")
    with pytest.raises(InvalidInputError):
        make_family("csv")
    with pytest.raises(InvalidInputError):
        make_family("nope", 1)
