import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from parallelotope import cli
from parallelotope.cli import ConfigError, RunConfig, format_scalar, main, parse_config, run


def run_capture(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(parse_config(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# configuration

def test_parse_valid_ratio():
    cfg = parse_config(["ratio", "--family", "monomial", "--m", "2", "--n-max", "100"])
    assert cfg == RunConfig(command="ratio", family="monomial", m=2, n_max=100)


@pytest.mark.parametrize("argv,code", [
    (["ratio", "--family", "monomial", "--m", "-1"], cli.EXIT_BAD_VALUE),
    (["ratio", "--m", "2"], cli.EXIT_MISSING_FAMILY),
    (["ratio", "--family", "csv"], cli.EXIT_MISSING_FAMILY),
    (["ratio", "--family", "monomial", "--m", "1", "--n-max", "0"], cli.EXIT_BAD_VALUE),
    (["bogus"], cli.EXIT_USAGE),
    ([], cli.EXIT_USAGE),
    (["ratio", "--family", "monomial", "--m", "x"], cli.EXIT_USAGE),
    (["charpoly", "--matrix", "c.csv"], cli.EXIT_USAGE),
])
def test_parse_errors(argv, code):
    with pytest.raises(ConfigError) as exc:
        parse_config(argv)
    assert exc.value.code == code


def test_main_negative_m_nonzero_exit(capsys):
    assert main(["ratio", "--family", "monomial", "--m", "-1"]) == cli.EXIT_BAD_VALUE
    assert "nonnegative" in capsys.readouterr().err


def test_config_file_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nfamily = monomial\nm = 3\nn-max = 40\nformat = csv\n")
    cfg = parse_config(["ratio", "--config", str(conf), "--m", "1"])
    assert (cfg.family, cfg.m, cfg.n_max, cfg.format, cfg.drop_index) == ("monomial", 1, 40, "csv", 0)


@pytest.mark.parametrize("text,code", [
    ("colour = red\n", cli.EXIT_USAGE),
    ("m = two\n", cli.EXIT_BAD_VALUE),
    ("mode = fuzzy\n", cli.EXIT_BAD_VALUE),
    ("just words\n", cli.EXIT_USAGE),
])
def test_config_file_errors(tmp_path, text, code):
    conf = tmp_path / "bad.conf"
    conf.write_text("family = monomial\n" + text)
    with pytest.raises(ConfigError) as exc:
        parse_config(["ratio", "--config", str(conf)])
    assert exc.value.code == code


def test_missing_config_file_is_io_error(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(["ratio", "--config", str(tmp_path / "none.conf")])
    assert exc.value.code == cli.EXIT_IO


# formatting

def test_format_scalar_exact_round_trip():
    f = format_scalar(Fraction(1, 3))
    assert f["value"] == "0.33333333333333333"
    assert Fraction(f["numerator"]) / Fraction(f["denominator"]) == Fraction(1, 3)


def test_format_scalar_float_round_trip():
    x = 0.1 + 0.2
    assert float(format_scalar(x)["value"]) == x


# commands

def test_ratio_json():
    code, out, _ = run_capture(["ratio", "--family", "monomial", "--m", "1", "--n-max", "4"])
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["scalar_mode"] == "exact"
    first = doc["series"][0]
    assert first["n"] == 2 and (first["numerator"], first["denominator"]) == ("1", "5")
    assert [r["n"] for r in doc["series"]] == [2, 3, 4]


def test_ratio_csv_header():
    code, out, _ = run_capture(["ratio", "--family", "monomial", "--m", "1", "--n-max", "3", "--format", "csv"])
    lines = out.splitlines()
    assert lines[0].startswith("# command: ratio")
    header = next(ln for ln in lines if not ln.startswith("#"))
    assert header.split(",")[:2] == ["n", "value"]


def test_ratio_degenerate_csv_exit_1(tmp_path):
    p = tmp_path / "dup.csv"
    p.write_text("1,2,3\n1,1,1\n1,1,1\n")
    code, _, err = run_capture(["ratio", "--family", "csv", "--csv", str(p), "--n-max", "3"])
    assert code == cli.EXIT_FAILED
    assert "degenerate" in err


def test_ragged_csv_exit_bad_value(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("1,2,3\n1,1\n")
    code, _, err = run_capture(["ratio", "--family", "csv", "--csv", str(p), "--n-max", "3"])
    assert code == cli.EXIT_BAD_VALUE and "row 2" in err


def test_missing_csv_file_io_error(tmp_path):
    code, _, _ = run_capture(["ratio", "--family", "csv", "--csv", str(tmp_path / "no.csv"), "--n-max", "3"])
    assert code == cli.EXIT_IO


def test_verify_seed7():
    code, out, _ = run_capture(["verify", "--seed", "7", "--max-order", "5", "--instances", "10"])
    assert code == 0
    assert all(r["passed"] == "true" for r in json.loads(out)["series"])


def test_bounds_and_distance_and_probe():
    code, out, _ = run_capture(["bounds", "--family", "monomial", "--m", "1", "--n-max", "6"])
    assert code == 0 and json.loads(out)["series"][0]["t0_1"] == "3/5"
    code, out, _ = run_capture(["distance", "--family", "monomial", "--m", "1", "--n-max", "2"])
    assert code == 0 and json.loads(out)["series"][0]["numerator"] == "1"
    code, out, _ = run_capture(["probe", "--family", "monomial", "--m", "1", "--n-max", "32"])
    assert code == 0 and json.loads(out)["meta"]["heuristic"] is True


def test_charpoly_command(tmp_path):
    m = tmp_path / "c.csv"
    m.write_text("0,1\n1,0\n")
    code, out, _ = run_capture(["charpoly", "--matrix", str(m), "--lambda", "2,3", "--vector", "1,1"])
    rec = json.loads(out)["series"][0]
    assert code == 0 and rec["numerator"] == "5" and rec["subset_expansion"] == "5"
    # (C(lam)^-1 a, a) with C(lam) = [[2,1],[1,3]] and a = (1,1): (2+3-2)/5
    assert rec["quadform"] == "3/5"


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run_capture(["ratio", "--family", "monomial", "--m", "1", "--n-max", "3", "-o", "r.json"])
    assert code == 0 and "R_3" in out
    assert json.loads((tmp_path / "r.json").read_text())["series"][-1]["n"] == 3


@pytest.mark.parametrize("argv", [
    ["ratio", "--family", "monomial", "--m", "2", "--n-max", "60"],
    ["ratio", "--family", "logpower", "--m", "2", "--n-max", "200", "--format", "csv"],
    ["shifted-ratio", "--family", "monomial", "--m", "1", "--n-max", "40", "--mode", "float"],
    ["probe", "--family", "monomial", "--m", "2", "--n-max", "64", "--seed", "3"],
    ["verify", "--seed", "2", "--instances", "5", "--max-order", "4"],
])
def test_determinism_byte_identical(tmp_path, argv):
    target = tmp_path / "run.out"
    outputs = []
    for _ in range(2):
        assert run(parse_config(argv + ["-o", str(target)]), io.StringIO(), io.StringIO()) == 0
        outputs.append(target.read_bytes())
        target.unlink()
    assert outputs[0] == outputs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "parallelotope", "ratio", "--family", "monomial",
                           "--m", "1", "--n-max", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["series"][0]["denominator"] == "5"
