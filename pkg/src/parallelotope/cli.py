"""Command-line front end.

    parallelotope ratio --family monomial --m 2 --n-max 100
    parallelotope verify --seed 7 --max-order 5

Output goes to ``--output`` (CSV or JSON) or to stdout. Exit codes: 0 ok,
1 verification failure or degenerate family, 2 usage error, 3 I/O
failure, 4 missing family, 5 invalid value.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from decimal import Context, Decimal
from fractions import Fraction
from pathlib import Path

from . import __version__
from .charpoly import gen_charpoly_direct, gen_charpoly_subset, quadform_lambda
from .distance import distance_squared, minimizer_cramer, residual_inner_products
from .engine import (
    REANCHOR_DEFAULT,
    auto_field,
    boundedness_report,
    l2_escape_probe,
    ratio_series,
    shifted_ratio_series,
)
from .errors import (
    CapacityError,
    DegeneracyError,
    DimensionError,
    FamilyFormatError,
    HorizonError,
    InvalidInputError,
    SingularMatrixError,
)
from .families import ingest_csv, make_family
from .matrix import Matrix
from .scalar import Field, field_for_mode
from .verify import run_suites

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MISSING_FAMILY = 4
EXIT_BAD_VALUE = 5

OUTPUT_DIR_ENV = "PARALLELOTOPE_OUTPUT_DIR"

COMMANDS = ("ratio", "shifted-ratio", "bounds", "distance", "charpoly", "verify", "probe")
FAMILY_COMMANDS = {"ratio", "shifted-ratio", "bounds", "distance", "probe"}


class ConfigError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str | None = None
    m: int | None = None
    csv: str | None = None
    custom: str | None = None
    pad: str | None = None
    n_max: int = 100
    drop_index: int = 0
    mode: str = "auto"
    rel_tol: float | None = None
    abs_tol: float | None = None
    reanchor: int = REANCHOR_DEFAULT
    output: str | None = None
    format: str = "json"
    seed: int = 0
    timing: bool = False
    every: int = 1
    instances: int = 50
    max_order: int | None = None
    samples: int = 4
    matrix: str | None = None
    lam: str | None = None
    vector: str | None = None

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


_DEFAULTS = {f.name: f.default for f in fields(RunConfig) if f.name != "command"}
_INT_KEYS = {"m", "n_max", "drop_index", "reanchor", "seed", "every", "instances", "max_order", "samples"}
_FLOAT_KEYS = {"rel_tol", "abs_tol"}
_BOOL_KEYS = {"timing"}
_CHOICES = {
    "family": ("monomial", "logpower", "zero", "csv", "custom"),
    "pad": ("monomial", "logpower", "zero"),
    "mode": ("auto", "exact", "float"),
    "format": ("csv", "json"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parallelotope",
        description="Gram-determinant ratios, hyperplane distances and identity checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "ratio": "Gram-determinant ratio series R_n",
        "shifted-ratio": "det(I + Gram) ratio series",
        "bounds": "minimizer and cofactor-inequality monitor",
        "distance": "squared distance of row s from the span of the other rows at n = n-max",
        "charpoly": "generalized characteristic polynomial of a matrix file",
        "verify": "randomized exact identity suites",
        "probe": "heuristic partial sums of row combinations",
    }
    S = argparse.SUPPRESS
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name], argument_default=S)
        p.add_argument("--config", help="key=value file; command-line flags take precedence")
        p.add_argument("--output", "-o", help="output file (default: stdout); relative paths honour "
                       f"${OUTPUT_DIR_ENV}")
        p.add_argument("--format", choices=_CHOICES["format"], help="output format (default json)")
        p.add_argument("--mode", choices=_CHOICES["mode"],
                       help="scalar backend (default auto: exact for integer families up to n = 512)")
        p.add_argument("--rel-tol", type=float, help="float relative tolerance (default 1e-9)")
        p.add_argument("--abs-tol", type=float, help="float absolute floor and singularity threshold (default 1e-12)")
        p.add_argument("--seed", type=int, help="seed for randomized work (default 0)")
        if name in FAMILY_COMMANDS:
            p.add_argument("--family", choices=_CHOICES["family"], help="vector family kind")
            p.add_argument("--m", type=int, help="index of the last row (family has m + 1 rows)")
            p.add_argument("--csv", help="table for --family csv: one row per vector")
            p.add_argument("--custom", help="rule file for --family custom: one expression in k per row")
            p.add_argument("--pad", choices=_CHOICES["pad"], help="continue a csv table with this rule")
            p.add_argument("--n-max", type=int, help="number of columns (default 100)")
        if name in {"ratio", "shifted-ratio", "distance"}:
            p.add_argument("--drop-index", "-s", type=int, help="row left out of the denominator (default 0)")
        if name in {"ratio", "shifted-ratio", "bounds"}:
            p.add_argument("--reanchor", type=int, help="steps between full recomputations, 0 disables (default 64)")
        if name in {"ratio", "shifted-ratio"}:
            p.add_argument("--timing", action="store_true", help="add wall-clock column (output no longer reproducible)")
        if name == "bounds":
            p.add_argument("--every", type=int, help="sample every k-th n (default 1)")
        if name == "verify":
            p.add_argument("--instances", type=int, help="instances per suite (default 50)")
            p.add_argument("--max-order", type=int, help="cap on matrix orders")
        if name == "probe":
            p.add_argument("--samples", type=int, help="random coefficient vectors (default 4)")
        if name == "charpoly":
            p.add_argument("--matrix", help="CSV file holding the square matrix C")
            p.add_argument("--lambda", dest="lam", help="comma-separated weights")
            p.add_argument("--vector", help="comma-separated vector a for (C(lam)^-1 a, a)")
    return parser


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}", EXIT_BAD_VALUE) from None
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}", EXIT_BAD_VALUE) from None
    if key in _BOOL_KEYS:
        if raw.lower() in {"1", "true", "yes", "on"}:
            return True
        if raw.lower() in {"0", "false", "no", "off"}:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}", EXIT_BAD_VALUE)
    if key in _CHOICES and raw not in _CHOICES[key]:
        raise ConfigError(f"{key}: {raw!r} not one of {', '.join(_CHOICES[key])}", EXIT_BAD_VALUE)
    return raw


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` comments; keys use ``-`` or ``_``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", EXIT_IO) from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "lambda":
            key = "lam"
        if key not in _DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def parse_config(argv, config_file=None) -> RunConfig:
    """Validated RunConfig from argv, an optional config file, and defaults (in that precedence)."""
    parser = build_parser()
    argv = list(argv)
    if not argv:
        raise ConfigError("no command given; choose one of " + ", ".join(COMMANDS))
    if argv[0] not in COMMANDS and not argv[0].startswith("-"):
        raise ConfigError(f"unknown command {argv[0]!r}; choose one of " + ", ".join(COMMANDS))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        raise ConfigError("invalid arguments", EXIT_USAGE if exc.code else EXIT_OK) from None
    given = vars(ns)
    command = given.pop("command")
    if command is None:
        raise ConfigError("no command given")
    cfg_path = given.pop("config", None) or config_file
    values = dict(_DEFAULTS)
    if cfg_path:
        values.update(read_config_file(cfg_path))
    values.update(given)
    cfg = RunConfig(command=command, **values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    bad = EXIT_BAD_VALUE
    if cfg.command in FAMILY_COMMANDS:
        if cfg.family is None:
            raise ConfigError("missing --family", EXIT_MISSING_FAMILY)
        if cfg.family == "csv" and not cfg.csv:
            raise ConfigError("--family csv needs --csv PATH", EXIT_MISSING_FAMILY)
        if cfg.family == "custom" and not cfg.custom:
            raise ConfigError("--family custom needs --custom PATH", EXIT_MISSING_FAMILY)
        if cfg.family in {"monomial", "logpower", "zero"}:
            if cfg.m is None:
                raise ConfigError(f"--family {cfg.family} needs --m", EXIT_MISSING_FAMILY)
            if cfg.m < 0:
                raise ConfigError(f"--m must be nonnegative, got {cfg.m}", bad)
    if cfg.n_max <= 0:
        raise ConfigError(f"--n-max must be positive, got {cfg.n_max}", bad)
    if cfg.drop_index < 0:
        raise ConfigError(f"--drop-index must be nonnegative, got {cfg.drop_index}", bad)
    if cfg.reanchor < 0:
        raise ConfigError("--reanchor must be nonnegative", bad)
    if cfg.every <= 0 or cfg.instances <= 0 or cfg.samples <= 0:
        raise ConfigError("--every, --instances and --samples must be positive", bad)
    if cfg.max_order is not None and cfg.max_order <= 0:
        raise ConfigError("--max-order must be positive", bad)
    for tol in (cfg.rel_tol, cfg.abs_tol):
        if tol is not None and tol < 0:
            raise ConfigError("tolerances must be nonnegative", bad)
    if cfg.command == "charpoly" and (cfg.matrix is None or cfg.lam is None):
        raise ConfigError("charpoly needs --matrix and --lambda", EXIT_USAGE)


# ---------------------------------------------------------------------------
# value formatting

_DECIMAL = Context(prec=17)


def format_scalar(x) -> dict:
    """Decimal string plus exact numerator/denominator strings for rationals."""
    if isinstance(x, Fraction):
        value = _DECIMAL.divide(Decimal(x.numerator), Decimal(x.denominator))
        return {"value": str(value), "numerator": str(x.numerator), "denominator": str(x.denominator)}
    return {"value": format(float(x), ".17g")}


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _record(n, value, **aux) -> dict:
    rec = {"n": n} if n is not None else {}
    rec.update(format_scalar(value))
    for k, v in aux.items():
        rec[k] = _num(v) if isinstance(v, (Fraction, float, bool)) else v
    return rec


# ---------------------------------------------------------------------------
# commands


def _field(cfg: RunConfig, family=None) -> Field:
    if cfg.mode == "auto":
        f = auto_field(family, cfg.n_max) if family is not None else field_for_mode("exact")
        if f.exact:
            return f
        return field_for_mode("float", cfg.rel_tol, cfg.abs_tol)
    return field_for_mode(cfg.mode, cfg.rel_tol, cfg.abs_tol)


def _family(cfg: RunConfig):
    # csv cells are parsed exactly unless float mode is forced
    parse_field = field_for_mode("float") if cfg.mode == "float" else field_for_mode("exact")
    return make_family(cfg.family, cfg.m, csv_path=cfg.csv, custom_path=cfg.custom, pad=cfg.pad,
                       field=parse_field)


def _cmd_series(cfg, shifted: bool):
    fam = _family(cfg)
    field = _field(cfg, fam)
    fn = shifted_ratio_series if shifted else ratio_series
    series = fn(fam, cfg.n_max, cfg.drop_index, field=field, reanchor=cfg.reanchor)
    records = []
    for e in series.entries:
        aux = {"t0_norm_sq": e.t0_norm_sq, "gram_full": e.numerator, "gram_reduced": e.denominator}
        if cfg.timing:
            aux["wallclock"] = float(e.wallclock)
        records.append(_record(e.n, e.value, **aux))
    meta = {"family": series.family, "drop_index": series.drop_index, "scalar_mode": field.name,
            "flagged": list(series.flagged)}
    last = series.entries[-1] if series.entries else None
    summary = (f"R_{last.n} = {format_scalar(last.value)['value']}" if last else "no entries") + \
              f" ({len(series.monotonicity_violations(field))} monotonicity violations)"
    return meta, records, summary, EXIT_OK


def _cmd_bounds(cfg):
    fam = _family(cfg)
    field = _field(cfg, fam)
    sample = range(fam.m_plus_1, cfg.n_max + 1, cfg.every)
    rep = boundedness_report(fam, cfg.n_max, sample=sample, field=field, reanchor=cfg.reanchor)
    records = []
    for r in rep.rows:
        if r.flagged:
            records.append({"n": r.n, "flagged": "true"})
            continue
        aux = {"envelope": r.envelope}
        for s, c in enumerate(r.observed_c, start=1):
            aux[f"observed_c_{s}"] = c
        for s, t in enumerate(r.t0, start=1):
            aux[f"t0_{s}"] = t
        aux["cauchy_schwarz_ok"] = r.cauchy_schwarz_ok
        aux["envelope_ok"] = r.envelope_ok
        records.append(_record(r.n, r.t0_norm_sq, **aux))
    meta = {"family": rep.family, "scalar_mode": field.name, "value": "squared norm of t0",
            "flagged": rep.flagged}
    ok = rep.all_ok
    summary = f"{len(rep.rows)} rows, max |t0| = {rep.max_t0_norm():.6g}, inequalities {'hold' if ok else 'VIOLATED'}"
    return meta, records, summary, EXIT_OK if ok else EXIT_FAILED


def _cmd_distance(cfg):
    fam = _family(cfg)
    field = _field(cfg, fam)
    s = cfg.drop_index
    if s > fam.m:
        raise InvalidInputError(f"drop index {s} outside 0..{fam.m}")
    if fam.m == 0:
        raise InvalidInputError("distance needs at least two rows")
    rows = fam.projection(cfg.n_max)
    f0 = rows[s]
    basis = [r for i, r in enumerate(rows) if i != s]
    d = distance_squared(f0, basis, field=field)
    cramer = minimizer_cramer(f0, basis, field=field)
    resid = residual_inner_products(f0, basis, d.minimizer, field)
    aux = {"gram_full": d.numerator, "gram_reduced": d.denominator}
    for k, (t, tc) in enumerate(zip(d.minimizer, cramer), start=1):
        aux[f"t0_{k}"] = t
        aux[f"t0_cramer_{k}"] = tc
    aux["max_residual_inner_product"] = max(abs(x) for x in resid)
    meta = {"family": fam.describe(), "drop_index": s, "scalar_mode": field.name}
    return meta, [_record(cfg.n_max, d.d_squared, **aux)], f"d^2 = {format_scalar(d.d_squared)['value']}", EXIT_OK


def _parse_list(text: str, field: Field) -> list:
    try:
        return [field.coerce(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse list {text!r}", EXIT_BAD_VALUE) from None


def _cmd_charpoly(cfg):
    field = _field(cfg)
    table = ingest_csv(cfg.matrix, field).table
    C = Matrix(table, field)
    lam = _parse_list(cfg.lam, field)
    direct = gen_charpoly_direct(C, lam)
    aux = {"subset_expansion": gen_charpoly_subset(C, lam)}
    if cfg.vector:
        aux["quadform"] = quadform_lambda(C, lam, _parse_list(cfg.vector, field))
    meta = {"matrix": cfg.matrix, "order": C.nrows, "scalar_mode": field.name}
    equal = field.eq(direct, aux["subset_expansion"])
    summary = f"P_C(lambda) = {format_scalar(direct)['value']}, subset expansion {'agrees' if equal else 'DISAGREES'}"
    return meta, [_record(None, direct, **aux)], summary, EXIT_OK if equal else EXIT_FAILED


def _cmd_verify(cfg):
    results = run_suites(seed=cfg.seed, instances=cfg.instances, max_order=cfg.max_order)
    records = [{"suite": r.name, "instances": r.instances, "failures": len(r.failures),
                "passed": "true" if r.passed else "false"} for r in results]
    passed = sum(r.passed for r in results)
    meta = {"scalar_mode": "exact"}
    summary = f"verify: {passed}/{len(results)} suites passed, " \
              f"{sum(len(r.failures) for r in results)} failing instances"
    return meta, records, summary, EXIT_OK if passed == len(results) else EXIT_FAILED


def _cmd_probe(cfg):
    fam = _family(cfg)
    rep = l2_escape_probe(fam, cfg.samples, cfg.n_max, seed=cfg.seed)
    records = []
    for d in rep.directions:
        for n, v in zip(d.checkpoints, d.sums):
            records.append({"direction": d.label, "n": n, "value": format(v, ".17g"),
                            "growth_exponent": "" if d.growth_exponent is None else format(d.growth_exponent, ".17g"),
                            "bounded_looking": "true" if d.bounded_looking else "false"})
    meta = {"family": rep.family, "scalar_mode": "float", "heuristic": True, "note": rep.note,
            "directions": {d.label: list(d.coeffs) for d in rep.directions}}
    summary = f"probe (heuristic): {len(rep.flagged)} of {len(rep.directions)} directions look bounded"
    return meta, records, summary, EXIT_OK


_HANDLERS = {
    "ratio": lambda c: _cmd_series(c, False),
    "shifted-ratio": lambda c: _cmd_series(c, True),
    "bounds": _cmd_bounds,
    "distance": _cmd_distance,
    "charpoly": _cmd_charpoly,
    "verify": _cmd_verify,
    "probe": _cmd_probe,
}


# ---------------------------------------------------------------------------
# output


def render_json(meta: dict, records: list[dict]) -> str:
    return json.dumps({"meta": meta, "series": records}, indent=2) + "\n"


def render_csv(meta: dict, records: list[dict]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {json.dumps(value) if not isinstance(value, str) else value}\n")
    columns: list[str] = []
    for rec in records:
        for k in rec:
            if k not in columns:
                columns.append(k)
    w = csv.DictWriter(buf, fieldnames=columns, restval="", lineterminator="\n")
    w.writeheader()
    w.writerows(records)
    return buf.getvalue()


def resolve_output(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        meta, records, summary, code = _HANDLERS[cfg.command](cfg)
    except DegeneracyError as exc:
        print(f"degenerate family: {exc}", file=stderr)
        return EXIT_FAILED
    except SingularMatrixError as exc:
        print(f"singular input: {exc}", file=stderr)
        return EXIT_FAILED
    except (FamilyFormatError, InvalidInputError, DimensionError, HorizonError, CapacityError) as exc:
        print(f"invalid input: {exc}", file=stderr)
        return EXIT_BAD_VALUE
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.code
    except OSError as exc:
        print(f"I/O error: {exc}", file=stderr)
        return EXIT_IO
    full_meta = {"command": cfg.command, "version": __version__, "config": cfg.echo(), **meta}
    text = render_json(full_meta, records) if cfg.format == "json" else render_csv(full_meta, records)
    if cfg.output:
        try:
            path = resolve_output(cfg.output)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"I/O error: {exc}", file=stderr)
            return EXIT_IO
        print(summary, file=stdout)
    else:
        stdout.write(text)
        print(summary, file=stderr)
    return code


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        if exc.code != EXIT_OK:
            print(f"error: {exc}", file=sys.stderr)
        return exc.code
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
