"""Command-line interface.

Exit codes: 0 on success, 1 on a mathematical or validation failure, 2 on a
usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import gmpy2

from . import counters, generators, mazzanti, sequences, verify
from .config import DEFAULT_POINT_BUDGET
from .errors import ArithTermError, ParseError
from .expdio import brute_count
from .terms import FactorialScheme, evaluate, parse, render, to_json

BIG_DIGITS = 10**4
GRAMMAR = """grammar:
  expr := sum;  sum := prod (("+"|"-") prod)*;  prod := pow (("*"|"/"|"%") pow)*
  pow := atom ("^" pow)?;  atom := NAT | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
  "-" is truncated subtraction, "/" floor division, "^" right-associative
  functions: min absdiff binom fact gcd nu2 hw mod"""


class UsageError(Exception):
    pass


def format_int(v: int, full: bool = False) -> str:
    s = gmpy2.mpz(v).digits()
    if full or len(s) <= BIG_DIGITS:
        return s
    return f"{s[:50]}...{s[-50:]} ({len(s)} digits)"


def _bindings(items) -> dict:
    env = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not value.isdigit():
            raise UsageError(f"bad binding {item!r}, expected name=value")
        env[name.strip()] = int(value)
    return env


def _scheme(name: str) -> FactorialScheme:
    return FactorialScheme[name.upper()]


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def cmd_eval(args):
    t = parse(args.expr)
    print(format_int(evaluate(t, _bindings(args.bind), args.bit_budget), args.full))


def cmd_parse(args):
    print(_dump(to_json(parse(args.expr))))


def cmd_gen(args):
    v = generators.generate(args.family, args.n, args.variant, args.mode, args.bit_budget)
    print(" ".join(format_int(x, args.full) for x in v) if isinstance(v, tuple)
          else format_int(v, args.full))


def cmd_count(args):
    if args.mode == "oracle":
        print(counters.ORACLES[args.family](args.n))
        return
    rep = counters.count_via_term(args.family, args.n, args.bit_budget, _scheme(args.scheme))
    print(rep.count if rep.count is not None else _dump(rep.to_json()))


def cmd_witness(args):
    if args.family == "mersenne":
        w = counters.mersenne_witness(args.k, args.n)
    elif args.family == "fermat":
        w = counters.fermat_witness(args.k, args.n)
    else:
        w = counters.twin_witness(args.k, args.n, _scheme(args.scheme or "minimal"),
                                  args.bit_budget)
    print(_dump({"witness": None if w is None else w.to_json()}))


def cmd_system(args):
    spec = counters.family_spec(args.family, _scheme(args.scheme))
    if args.emit == "text":
        print(spec.system.render())
        print(f"t(n) = {render(spec.t_of_n)}")
        print(f"w(n) = {render(spec.w_of_n)}")
        print(f"unknowns = {spec.k_vars}, offset = {spec.offset:+d}")
        return
    print(_dump({"system": spec.system.to_json(), "t_of_n": to_json(spec.t_of_n),
                 "w_of_n": to_json(spec.w_of_n), "k_vars": spec.k_vars, "offset": spec.offset}))


def cmd_mazzanti(args):
    ci = mazzanti.CountingInstance.from_json(_read_json(args.file))
    count = mazzanti.count_solutions(ci, args.bit_budget)
    if args.brute:
        print(count, brute_count(ci.poly, ci.t, point_budget=args.point_budget))
    else:
        print(count)


def cmd_crec(args):
    spec = sequences.CRecSpec.from_json(_read_json(args.file))
    ex = sequences.extract_divmod_term(spec, args.c, args.var)
    if args.json:
        print(_dump({"term": to_json(ex.term), "validity": ex.validity.to_json()}))
    else:
        print(render(ex.term))


def cmd_verify(args):
    results = verify.verify_suite(args.selector)
    print(verify.report_json(results))
    return 0 if all(r.status == "pass" for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arithterm", description=__doc__.splitlines()[0],
                                epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--bit-budget", type=int, default=None,
                   help="bit budget for big values (default: ATL_BIT_BUDGET or 2^24)")
    p.add_argument("--point-budget", type=int, default=DEFAULT_POINT_BUDGET)
    p.add_argument("--full", action="store_true", help="print huge numbers in full")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", help="evaluate an expression")
    s.add_argument("--expr", required=True)
    s.add_argument("--bind", action="append", metavar="NAME=VALUE")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("parse", help="print the JSON syntax tree")
    s.add_argument("--expr", required=True)
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("gen", help="prime generator value")
    s.add_argument("family", choices=generators.FAMILIES)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--variant", type=int, choices=(1, 2), default=1)
    s.add_argument("--mode", choices=("semantic", "term"), default="semantic")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("count", help="count primes of a family up to n")
    s.add_argument("family", choices=generators.FAMILIES)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=("oracle", "term"), default="oracle")
    s.add_argument("--scheme", choices=("pow8sq", "minimal"), default="pow8sq")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("witness", help="solution of a counting system")
    s.add_argument("family", choices=("mersenne", "fermat", "twin"))
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--scheme", choices=("pow8sq", "minimal"), default=None)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("system", help="emit a counting system")
    s.add_argument("family", choices=("mersenne", "fermat", "twin"))
    s.add_argument("--emit", choices=("json", "text"), default="text")
    s.add_argument("--scheme", choices=("pow8sq", "minimal"), default="pow8sq")
    s.set_defaults(func=cmd_system)

    s = sub.add_parser("mazzanti-count", help="count zeros of a CountingInstance JSON")
    s.add_argument("file", help="path or - for stdin")
    s.add_argument("--brute", action="store_true", help="also count by enumeration")
    s.set_defaults(func=cmd_mazzanti)

    s = sub.add_parser("crec", help="div-mod term of a CRecSpec JSON")
    s.add_argument("file", help="path or - for stdin")
    s.add_argument("--c", type=int, default=None)
    s.add_argument("--var", default="n")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_crec)

    s = sub.add_parser("verify", help="run the verification suite")
    s.add_argument("selector", choices=verify.SELECTORS, nargs="?", default="all")
    s.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.bit_budget is None and "ATL_BIT_BUDGET" in os.environ:
        args.bit_budget = int(os.environ["ATL_BIT_BUDGET"])
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}\n{GRAMMAR}", file=sys.stderr)
        return 1
    except (ArithTermError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return code or 0


def main():
    sys.exit(run())
