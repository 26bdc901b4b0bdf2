"""Command-line front end.

Subcommands::

    rotform recover    --form PATH [--unit x,y,z] [--tol T]
    rotform recover    --random --seed S [--cond C]
    rotform verify     --suite NAME --trials N --seed S (--form PATH | --random [--cond C])
    rotform transport  --form PATH --from 'v;w' --to 'v;w'
    rotform pythagoras --form PATH --unit x,y,z --v x,y,z --w x,y,z

Exit codes: 0 success, 1 suite failure, 2 bad input, 3 oracle contract failure.
Vectors starting with a minus sign need the ``--opt=value`` spelling.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from .errors import InputError, InvalidForm, OracleContractError
from .geometry import TOL, Flag, LengthUnit, SymmetricForm, as_vector
from .reconstruction import pythagoras, recover_form
from .rotation_group import make_oracle, membership_residuals, transport
from .verification import SUITES, random_spd, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_ORACLE = 3


class FormFileError(InputError):
    def __init__(self, msg: str, line: int, column: int, source: str = "<form>"):
        super().__init__(f"{source}:{line}:{column}: {msg}")
        self.line = line
        self.column = column


def parse_form(text: str, source: str = "<form>") -> SymmetricForm:
    """Parse three rows of three floats; blank lines and ``#`` comments are skipped."""
    rows = []
    last = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        last = lineno
        if len(rows) == 3:
            raise FormFileError("more than 3 rows", lineno, 1, source)
        row = []
        for tok in re.finditer(r"\S+", line):
            try:
                row.append(float(tok.group()))
            except ValueError:
                raise FormFileError(
                    f"not a number: {tok.group()!r}", lineno, tok.start() + 1, source
                ) from None
        if len(row) != 3:
            raise FormFileError(f"expected 3 entries, found {len(row)}", lineno, 1, source)
        rows.append(row)
    if len(rows) != 3:
        raise FormFileError(f"expected 3 rows, found {len(rows)}", last + 1, 1, source)
    try:
        return SymmetricForm(np.array(rows))
    except InvalidForm as exc:
        raise InvalidForm(f"{source}: {exc}") from None


def load_form(path: str | Path) -> SymmetricForm:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_form(text, str(path))


def fmt(x: float) -> str:
    # + 0.0 folds -0.0 into 0.0
    return f"{float(x) + 0.0:.17g}"


def format_matrix(m: np.ndarray) -> str:
    return "\n".join(" ".join(fmt(x) for x in row) for row in np.asarray(m)) + "\n"


def parse_vector(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise InputError(f"expected a vector x,y,z, got {text!r}")
    try:
        return as_vector([float(p) for p in parts])
    except ValueError:
        raise InputError(f"bad vector {text!r}") from None


def parse_flag(text: str) -> Flag:
    parts = text.split(";")
    if len(parts) != 2:
        raise InputError(f"expected a flag v;w, got {text!r}")
    return Flag(parse_vector(parts[0]), parse_vector(parts[1]))


def _form_from_args(args) -> SymmetricForm:
    if getattr(args, "random", False):
        return random_spd(np.random.default_rng(args.seed), args.cond)
    if args.form is None:
        raise InputError("one of --form or --random is required")
    return load_form(args.form)


def cmd_recover(args, out) -> int:
    form = _form_from_args(args)
    unit = LengthUnit(parse_vector(args.unit)) if args.unit else LengthUnit()
    recovered = recover_form(make_oracle(form), unit, args.tol)
    out.write(format_matrix(recovered.m))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    form = _form_from_args(args)
    unit = LengthUnit(parse_vector(args.unit)) if args.unit else LengthUnit()
    names = SUITES if args.suite == "all" else (args.suite,)
    status = EXIT_OK
    for name in names:
        report = run_suite(name, form, args.trials, args.seed, unit, args.tol, args.jobs)
        data = report.to_json()
        if args.no_timing:
            data["millis"] = 0
        out.write(json.dumps(data) + "\n")
        if not report.passed:
            status = EXIT_FAILED
    return status


def cmd_transport(args, out) -> int:
    form = load_form(args.form)
    d = transport(form, parse_flag(args.source), parse_flag(args.target))
    pull, _ = membership_residuals(form, d)
    out.write(format_matrix(d.m))
    out.write(f"det = {fmt(d.det)}\n")
    out.write(f"pullback_residual = {fmt(pull)}\n")
    return EXIT_OK


def cmd_pythagoras(args, out) -> int:
    form = load_form(args.form)
    unit = LengthUnit(parse_vector(args.unit))
    v = parse_vector(args.v)
    w = parse_vector(args.w)
    try:
        a, b, c, res = pythagoras(make_oracle(form), unit, v, w, args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out.write(f"a = {fmt(a)}\nb = {fmt(b)}\nc = {fmt(c)}\nresidual = {fmt(res)}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotform",
        description="Scalar products from rotation groups: recover, transport, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def form_source(p, random_ok=True):
        p.add_argument("--form", help="form file: 3 rows of 3 floats, '#' comments allowed")
        if random_ok:
            p.add_argument("--random", action="store_true", help="use a seeded random SPD form")
            p.add_argument("--cond", type=float, default=1e3, help="max condition number for --random")
        p.add_argument("--tol", type=float, default=TOL)

    p = sub.add_parser("recover", help="recover a form from its rotation group")
    form_source(p)
    p.add_argument("--unit", help="length unit vector x,y,z (default 1,0,0)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify", help="run verification suites, one JSON report per line")
    form_source(p)
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unit", help="length unit vector x,y,z (default 1,0,0)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads per suite")
    p.add_argument("--no-timing", action="store_true", help="report millis as 0")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transport", help="print the rotation carrying one flag to another")
    form_source(p, random_ok=False)
    p.add_argument("--from", dest="source", required=True, help="flag 'v;w'")
    p.add_argument("--to", dest="target", required=True, help="flag 'v;w'")
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("pythagoras", help="check a^2 + b^2 = c^2 for perpendicular v, w")
    form_source(p, random_ok=False)
    p.add_argument("--unit", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--w", required=True)
    p.set_defaults(func=cmd_pythagoras)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("transport", "pythagoras") and args.form is None:
        parser.error("--form is required")
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be at least 1")
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"rotform: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleContractError as exc:
        print(f"rotform: oracle contract violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
