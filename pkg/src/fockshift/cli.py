"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import coeffs
from .diagring import d_zero
from .opcalc import (TruncationOverflow, WordSyntaxError, apply, parse_word, shift_commutator,
                     to_matrix)
from .scalar import UnsupportedInExactMode, format_scalar, parse_mode, parse_scalar
from .suite import DEFAULT_CONFIG, load_config, run_suite
from .verify import ConfigError, named_pair, run_identity
from .weights import FamilySpecError, MissingWeight, parse_family

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_USAGE_ERRORS = (ConfigError, FamilySpecError, WordSyntaxError, TruncationOverflow,
                 UnsupportedInExactMode, MissingWeight, ValueError, ZeroDivisionError)


class UsageError(Exception):
    pass


def _positive_n(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("N must be at least 2")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockshift",
                                     description="Exact weighted-shift operator calculus.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="classic",
                        help="classic | pfock:p=2 | ml:rho=1,mu=1 | dunkl:kappa=1/2 | "
                             "custom:@file.json | custom:seed=7")
    common.add_argument("--mode", default=None, help="exact | float | float:<tol>")
    common.add_argument("--N", type=_positive_n, default=None, help="truncation size")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    v = sub.add_parser("verify", parents=[common], help="check one identity")
    v.add_argument("--identity", required=True)
    for flag in ("n", "p", "m", "trials", "nmax"):
        v.add_argument(f"--{flag}", type=int)
    for flag in ("pair", "which", "kind", "seed"):
        v.add_argument(f"--{flag}")
    v.add_argument("--full", action="store_true", help="list every witness")

    s = sub.add_parser("suite", parents=[common], help="run a verification suite")
    s.add_argument("--config", default=None, help="JSON config; default suite if omitted")
    s.add_argument("--full", action="store_true")

    for name in ("lambda", "gamma"):
        t = sub.add_parser(name, parents=[common], help=f"dump a {name} coefficient diagonal")
        t.add_argument("--k", type=int, required=True)
        t.add_argument("--n", type=int, required=True)
        t.add_argument("--pair", default="R0,Iphi", help="(A,B) whose commutator seeds D")
        t.add_argument("--seed", default=None, help="'D0' to use the [R0,I] seed directly")
        t.add_argument("--route", choices=("recurrence", "closed"), default="recurrence")

    m = sub.add_parser("matrix", parents=[common], help="print a truncated operator matrix")
    m.add_argument("--op", required=True, help='e.g. "I^2 R0^2"')

    a = sub.add_parser("apply", parents=[common], help="apply an operator to a polynomial")
    a.add_argument("--op", required=True)
    a.add_argument("--poly", required=True, help='coefficients of z^0, z^1, ...: "0,1,0,3"')
    return parser


def _weights(args):
    mode = parse_mode(args.mode) if args.mode else None
    return parse_family(args.family, mode)


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _report_rows(reports):
    yield ["identity", "family", "params", "N", "mode", "status", "max_abs_err", "witnesses"]
    for r in reports:
        d = r.to_dict()
        yield [d["identity"], d["family"], json.dumps(d["params"], sort_keys=True), d["N"],
               d["mode"], d["status"], d["max_abs_err"] or "", len(r.witnesses)]


def _cmd_verify(args) -> int:
    w = _weights(args)
    params = {k: getattr(args, k) for k in ("n", "p", "m", "trials", "nmax", "pair", "which",
                                            "kind", "seed") if getattr(args, k) is not None}
    report = run_identity(args.identity, w, params, args.N or 32)
    if args.format == "csv":
        _emit(args, _csv(_report_rows([report])))
    else:
        _emit(args, json.dumps(report.to_dict(args.full), indent=2) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_suite(args) -> int:
    config = load_config(args.config) if args.config else dict(DEFAULT_CONFIG)
    if args.N is not None:
        config["N"] = args.N
    if args.mode is not None:
        config["mode"] = args.mode
    reports = run_suite(config)
    if args.format == "csv":
        _emit(args, _csv(_report_rows(reports)))
    else:
        _emit(args, json.dumps([r.to_dict(args.full) for r in reports], indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_table(args) -> int:
    N = args.N or 16
    if not 0 <= args.k <= args.n:
        raise UsageError("need 0 <= k <= n")
    if args.seed == "D0":
        D = d_zero()
    elif args.seed is not None:
        raise UsageError("--seed only accepts 'D0'")
    else:
        A, B = named_pair(_weights(args), args.pair)
        D = shift_commutator(A, B)
    kind = coeffs.LAMBDA if args.command == "lambda" else coeffs.GAMMA
    if args.route == "closed" and args.k > 0:
        diag = coeffs.closed_form(D, args.k, args.n, kind)
    else:
        diag = coeffs.table(D, kind).get(args.k, args.n)
    entries = [format_scalar(x) for x in diag.materialize(N)]
    if args.format == "csv":
        _emit(args, _csv([["index", "value"]] + [[i, x] for i, x in enumerate(entries)]))
    else:
        _emit(args, json.dumps({"k": args.k, "n": args.n, "entries": entries}) + "\n")
    return EXIT_OK


def _cmd_matrix(args) -> int:
    w = _weights(args)
    N = args.N or 8
    M = to_matrix(parse_word(args.op, w), N, w.mode.coerce(1))
    rows = [[format_scalar(x) for x in row] for row in M.rows]
    if args.format == "csv":
        _emit(args, _csv(rows))
    else:
        payload = {"op": args.op, "family": w.label, "N": N, "rows": rows,
                   "trusted_columns": M.trusted_columns()}
        _emit(args, json.dumps(payload) + "\n")
    return EXIT_OK


def _cmd_apply(args) -> int:
    w = _weights(args)
    word = parse_word(args.op, w)
    try:
        f = [parse_scalar(c, w.mode) for c in args.poly.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad polynomial {args.poly!r}: {exc}") from exc
    N = args.N or max(len(f) + word.max_raise, 2)
    out = apply(word, f, N)
    while len(out) > 1 and not out[-1]:
        out.pop()
    values = [format_scalar(w.mode.coerce(x)) for x in out]
    if args.format == "json":
        _emit(args, json.dumps({"op": args.op, "family": w.label, "result": values}) + "\n")
    else:
        _emit(args, ",".join(values) + "\n")
    return EXIT_OK


_COMMANDS = {"verify": _cmd_verify, "suite": _cmd_suite, "lambda": _cmd_table,
             "gamma": _cmd_table, "matrix": _cmd_matrix, "apply": _cmd_apply}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, *_USAGE_ERRORS) as exc:
        print(f"fockshift {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
