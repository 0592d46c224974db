"""Command-line interface: ``hsleaps <command> ...``.

Exit codes: 0 success (or PASS), 1 FAIL verdict, 2 bad input, 3 search
budget exhausted, 4 oracle failure, 5 failed postcondition.
"""

from __future__ import annotations

import argparse
import sys

from . import bivariate, digits, hsd
from .errors import (BadN, BudgetExceeded, HSError, HypothesisViolated, NotFoundWithinBounds,
                     OracleFailure, ParseError)
from .integrate import PipelineTrace, SearchOracle, bridge_leap
from .leapfinder import SearchBounds, default_branch_cap, default_degree_range, scan_leaps, to_tsv
from .poly import Poly, groebner_basis
from .zpfield import check_prime

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET, EXIT_ORACLE, EXIT_POST = range(6)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _names(text):
    names = [x.strip() for x in text.split(",") if x.strip()]
    if not names or len(set(names)) != len(names):
        raise argparse.ArgumentTypeError("expected distinct comma-separated variable names")
    return names


def _ideal(texts, names, p):
    # the line number of a parse error is the generator's position
    return groebner_basis([Poly.parse(t, names, p, line=k) for k, t in enumerate(texts, 1)])


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _bounds(args):
    cap = args.branch_cap if args.branch_cap is not None else default_branch_cap()
    return SearchBounds(degree_bound=args.degree_bound, branch_cap=cap)


# -- commands ----------------------------------------------------------------

def cmd_leaps(args):
    p = check_prime(args.prime)
    names = args.vars
    weights = args.weights or [1] * len(names)
    if len(weights) != len(names):
        raise ParseError("one weight per variable is required", 1, 1)
    I = _ideal(args.ideal, names, p)
    degrees = default_degree_range(weights, args.max_degree, args.min_degree)
    report = scan_leaps(I, weights, args.max_order, degrees, _bounds(args), jobs=args.jobs)
    _write(args.output, to_tsv(report))
    for a in report.table.anomalies:
        print(f"warning: non-subspace pass set {a}", file=sys.stderr)
    return EXIT_OK if report.verdict else EXIT_FAIL


def cmd_bridge(args):
    D, names = hsd.from_text(_read(args.input))
    I = _ideal(args.ideal, names, D.p)
    weights = args.weights or [1] * len(names)
    trace = PipelineTrace()
    oracle = SearchOracle(weights, _bounds(args))
    try:
        R = bridge_leap(D, args.n, I, oracle, trace)
    finally:
        if args.trace:
            _write(args.trace, trace.dump())
    _write(args.output, hsd.to_text(R, names))
    return EXIT_OK


def cmd_tp(args):
    print(digits.t_p(args.n, args.p))


def cmd_binom(args):
    print(digits.binom_mod_p(args.n, args.m, args.p).value)


def cmd_cset(args):
    print(digits.cset_max(args.m, args.e, args.s, args.p))


def cmd_fermat(args):
    print(" ".join(str(a.value) for a in digits.fermat_system(args.m, args.p)))


def _load(path):
    return hsd.from_text(_read(path))


def cmd_compose(args):
    D, names = _load(args.first)
    E, names2 = _load(args.second)
    if names != names2:
        raise ParseError("derivations use different variable names", 2, 1)
    sys.stdout.write(hsd.to_text(hsd.compose(D, E), names))


def cmd_inverse(args):
    D, names = _load(args.input)
    sys.stdout.write(hsd.to_text(hsd.inverse(D), names))


def _bi_text(G, names):
    c = G.coideal
    lines = [f"prime {G.p}", "vars " + " ".join(names), f"coideal {c.w1} {c.w2} {c.bound}"]
    for name, row in zip(names, G.images):
        for a in c.elements():
            if a != (0, 0) and a in row:
                lines.append(f"map {name} {a[0]},{a[1]} {row[a].to_str(names)}")
    return "\n".join(lines) + "\n"


def cmd_gd(args):
    D, names = _load(args.input)
    delta = bivariate.CoIdeal2(args.w1, args.w2, args.bound)
    sys.stdout.write(_bi_text(bivariate.gd(D, delta), names))


def cmd_gdpt(args):
    D, names = _load(args.input)
    sys.stdout.write(hsd.to_text(bivariate.gd_pt(D, args.n, D.p), names))


def build_parser():
    ap = _Parser(prog="hsleaps", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def search_flags(sp):
        sp.add_argument("--degree-bound", type=int, default=None,
                        help="explicit total-degree bound (default: weighted-degree bounds)")
        sp.add_argument("--branch-cap", type=int, default=None,
                        help="max branches per search stage (env HSLEAPS_BRANCH_CAP)")

    sp = sub.add_parser("leaps", help="tabulate integrable derivations and report leaps")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--vars", type=_names, required=True, help="comma-separated names")
    sp.add_argument("--weights", type=_int_list, default=None)
    sp.add_argument("--ideal", action="append", required=True, help="generator (repeatable)")
    sp.add_argument("--max-order", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp.add_argument("--min-degree", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--output", default=None)
    search_flags(sp)
    sp.set_defaults(func=cmd_leaps)

    sp = sub.add_parser("bridge", help="extend an (n-1)-logarithmic derivation to length n")
    sp.add_argument("--ideal", action="append", required=True)
    sp.add_argument("--weights", type=_int_list, default=None)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", default=None)
    sp.add_argument("--trace", default=None)
    search_flags(sp)
    sp.set_defaults(func=cmd_bridge)

    for name, fields, func in [("tp", "n p", cmd_tp), ("binom", "n m p", cmd_binom),
                               ("cset", "m e s p", cmd_cset), ("fermat", "m p", cmd_fermat)]:
        sp = sub.add_parser(name)
        for f in fields.split():
            sp.add_argument(f, type=int)
        sp.set_defaults(func=func)

    sp = sub.add_parser("compose", help="compose two derivation files")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("inverse")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_inverse)

    sp = sub.add_parser("gd", help="bivariate G^D on the co-ideal w1*i + w2*j <= bound")
    sp.add_argument("input")
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--w1", type=int, default=1)
    sp.add_argument("--w2", type=int, default=1)
    sp.set_defaults(func=cmd_gd)

    sp = sub.add_parser("gdpt", help="weighted one-variable collapse of gd for a given n")
    sp.add_argument("input")
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_gdpt)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotFoundWithinBounds, BudgetExceeded) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OracleFailure as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except HypothesisViolated as exc:
        print(f"postcondition failed: {exc}", file=sys.stderr)
        return EXIT_POST
    except (BadN, HSError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
