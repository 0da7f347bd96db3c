"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 no rule found by
``generate``, 64 usage error.  Errors go to stderr as single lines of the
form ``error: <category>: <message>``.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .decomp import enumerate_decompositions
from .duffy import duffy_rule
from .elements import ElementKind
from .harness import (convergence_experiment, exactness_experiment, write_csv)
from .jacobi import ParameterError
from .polytope_seq import format_sequence, sequence_a, sequence_b
from .quadgen import SolveConfig, best_rule, search, verify_rule
from .rules import (RULES_ENV, RuleFormatError, RuleValidationError, catalog_table,
                    read_rule, resolve_rule_path, rule_path, write_rule)

EXIT_OK, EXIT_VERIFY_FAIL, EXIT_NO_RULE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _element(value):
    try:
        return ElementKind.parse(value)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cap(value):
    if value.lower() in ("none", "inf"):
        return None
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stquad", description="Symmetric quadrature on 4D space-time elements.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sequences", help="print 0/1-polytope degeneration sequences")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--variant", choices=("a", "b"), default="a")
    s.add_argument("--polytopes", action="store_true",
                   help="also print the vertex set of every polytope")

    s = sub.add_parser("decomps", help="list orbital decompositions")
    s.add_argument("--element", type=_element, required=True)
    s.add_argument("--points", type=int, required=True)
    s.add_argument("--max-s1", type=_cap, default=1, help="centroid multiplicity cap (or 'none')")

    s = sub.add_parser("generate", help="search for a symmetric rule")
    s.add_argument("--element", type=_element, required=True)
    s.add_argument("--strength", type=int, required=True)
    s.add_argument("--points", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--starts", type=int, default=16)
    s.add_argument("--extended", action="store_true", help="polish in extended precision")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--max-iterations", type=int, default=200)
    s.add_argument("--max-decompositions", type=int)
    s.add_argument("--skip-underdetermined", action="store_true",
                   help="skip decompositions with fewer unknowns than equations")
    s.add_argument("--signature", action="append",
                   help="only try this decomposition, e.g. 'S1^1 S2^1' (repeatable)")
    s.add_argument("--out", type=Path, help="output file (default rules/<element>/<P>-<N>.txt)")

    s = sub.add_parser("verify", help="check a rule against exact monomial integrals")
    s.add_argument("--rule", required=True)
    s.add_argument("--strength", type=int)
    s.add_argument("--extended", action="store_true")

    s = sub.add_parser("exactness", help="random-polynomial exactness table (CSV)")
    s.add_argument("--element", type=_element, required=True)
    s.add_argument("--strengths", type=int, nargs="*", default=[])
    s.add_argument("--rule", action="append", default=[], help="rule file (repeatable)")
    s.add_argument("--p-max", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--extended", action="store_true")
    s.add_argument("--out", type=Path)

    s = sub.add_parser("convergence", help="grid convergence table (CSV)")
    s.add_argument("--element", type=_element, required=True)
    s.add_argument("--strengths", type=int, nargs="*", default=[])
    s.add_argument("--rule", action="append", default=[])
    s.add_argument("--function", choices=("f1", "f2", "f3"), required=True)
    s.add_argument("--m", type=int, nargs="+", default=[1, 2, 3, 4])
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--extended", action="store_true")
    s.add_argument("--out", type=Path)

    s = sub.add_parser("export-duffy", help="write a collapsed tensor-product rule")
    s.add_argument("--element", type=_element, required=True)
    s.add_argument("--axis-points", type=int, required=True)
    s.add_argument("--extended", action="store_true")
    s.add_argument("--out", type=Path)

    sub.add_parser("catalog", help="bundled rules against published point counts")
    return p


def _rules_from_args(kind, args):
    rules = [read_rule(resolve_rule_path(r)) for r in args.rule]
    rules += list(args.strengths)
    if not rules:
        raise UsageError("give --strengths or --rule")
    return rules


def _out(path):
    return sys.stdout if path is None else path


def _cmd_sequences(args):
    seq = (sequence_a if args.variant == "a" else sequence_b)(args.dim)
    sys.stdout.write(format_sequence(seq, args.polytopes))
    return EXIT_OK


def _cmd_decomps(args):
    decs = enumerate_decompositions(args.element, args.points, args.max_s1)
    for d in decs:
        print(d.signature)
    print(f"# {len(decs)} decompositions", file=sys.stderr)
    return EXIT_OK


def _cmd_generate(args):
    cfg = SolveConfig(max_iterations=args.max_iterations, n_starts=args.starts,
                      rng_seed=args.seed, jobs=args.jobs,
                      precision_mode="extended" if args.extended else "double",
                      max_decompositions=args.max_decompositions,
                      skip_underdetermined=args.skip_underdetermined,
                      signatures=tuple(args.signature) if args.signature else None)
    results = search(args.element, args.strength, args.points, cfg)
    rule = best_rule(results)
    if rule is None:
        best = results[0].residual if results else float("nan")
        print(f"no rule found: attempts={len(results)} best_residual={best:.3e}")
        return EXIT_NO_RULE
    dest = args.out or rule_path(args.element, args.strength, args.points, root="rules")
    write_rule(rule, dest)
    print(f"wrote {dest} signature={rule.signature()} residual={results[0].residual:.3e}")
    return EXIT_OK


def _cmd_verify(args):
    try:
        rule = read_rule(resolve_rule_path(args.rule))
    except (RuleFormatError, RuleValidationError) as exc:
        print(f"error: invalid-rule: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    report = verify_rule(rule, args.strength, extended=args.extended)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_exactness(args):
    rules = _rules_from_args(args.element, args)
    rows = exactness_experiment(args.element, rules, args.p_max, args.seed, args.extended)
    write_csv((r.csv_row() for r in rows), _out(args.out))
    return EXIT_OK


def _convergence_job(job):
    kind, rule, f_id, m, extended = job
    return convergence_experiment(kind, [rule], f_id, [m], extended)[0]


def _cmd_convergence(args):
    from .harness import ConvergenceSeries, fit_slope
    from .rules import get_rule

    rules = [r if not isinstance(r, int) else get_rule(args.element, r)
             for r in _rules_from_args(args.element, args)]
    jobs = [(args.element, r, args.function, m, args.extended) for r in rules for m in args.m]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            parts = list(pool.map(_convergence_job, jobs))
    else:
        parts = [_convergence_job(j) for j in jobs]
    rows = []
    n = len(args.m)
    for i, rule in enumerate(rules):
        chunk = parts[i * n:(i + 1) * n]
        hs = [c.hs[0] for c in chunk]
        errs = [c.errors[0] for c in chunk]
        series = ConvergenceSeries(rule.kind, rule.strength, args.function, list(args.m), hs,
                                   [c.Js[0] for c in chunk], chunk[0].J_inf, errs,
                                   fit_slope(hs, errs))
        rows.extend(series.csv_rows())
        slope = "n/a" if series.slope is None else f"{series.slope:.3f}"
        print(f"# {rule.kind} strength={rule.strength} {args.function} slope={slope}",
              file=sys.stderr)
    write_csv(rows, _out(args.out))
    return EXIT_OK


def _cmd_export_duffy(args):
    rule = duffy_rule(args.element, args.axis_points, args.extended)
    dest = args.out or Path(f"{args.element}-duffy-{args.axis_points}.txt")
    write_rule(rule, dest, expanded=True)
    print(f"wrote {dest} points={rule.n_points} strength={rule.strength}")
    return EXIT_OK


def _cmd_catalog(args):
    print("element,strength,bundled_points,published_points")
    for kind, strength, have, pub in catalog_table():
        print(f"{kind},{strength},{'' if have is None else have},{pub}")
    return EXIT_OK


_COMMANDS = {
    "sequences": _cmd_sequences, "decomps": _cmd_decomps, "generate": _cmd_generate,
    "verify": _cmd_verify, "exactness": _cmd_exactness, "convergence": _cmd_convergence,
    "export-duffy": _cmd_export_duffy, "catalog": _cmd_catalog,
}


def run(argv=None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                                format="%(levelname)s %(name)s: %(message)s")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, KeyError) as exc:
        print(f"error: parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: not-found: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuleFormatError, RuleValidationError) as exc:
        print(f"error: invalid-rule: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser", "RULES_ENV"]
