"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 malformed input (parse, type,
file format or not-a-filter), 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import io
from .axioms import named_equality_axioms, real_axis_library
from .core_types import DEFAULT_MAX_TERMINAL
from .errors import (
    BudgetExceeded, EvaluationError, FormulaSyntaxError, FormulaTypeError, InfralogError, InvalidSystem, NotAFilter,
    SignatureMismatch, SourceError, TypeSyntaxError,
)
from .exemplars import make_fraction_system, make_segment_system, two_element_field
from .formulas import free_variables, to_text
from .infraproduct import infraproduct, infrapower
from .semantics import equality_axiom_failure, satisfies

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(InfralogError):
    pass


def _dump_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def cmd_check(args) -> int:
    U = io.load_system(args.system, max_terminal=args.max_terminal)
    formulas, source = io.read_formulas(args.formula, U.sig)
    gamma = io.load_evaluation(args.evaluation, U) if args.evaluation else {}
    for i, phi in enumerate(formulas, 1):
        missing = sorted(v.name for v in free_variables(phi) if v not in gamma)
        if missing:
            where = args.evaluation or "no evaluation file"
            raise UsageError(f"{source}:{i}: [evaluation] formula has free variables {missing} "
                             f"not bound by {where}")
    for phi in formulas:
        verdict = satisfies(U, phi, gamma, standard=args.standard)
        print(f"{'true' if verdict else 'false'}\t{to_text(phi)}" if len(formulas) > 1 else
              ("true" if verdict else "false"))
    return EXIT_OK


def cmd_infraproduct(args) -> int:
    fam = io.load_family(args.family, max_terminal=args.max_terminal)
    D = io.load_filter(args.filter, fam.index_set)
    P = infraproduct(fam, D, max_terminal=args.max_terminal, validate=False)
    io.save_system(P, args.out)
    print(f"carrier size {P.n}")
    if args.check_axioms:
        return _report_axioms(P)
    return EXIT_OK


def cmd_infrapower(args) -> int:
    U = io.load_system(args.system, max_terminal=args.max_terminal)
    D = io.load_filter(args.filter)
    P, _ = infrapower(U, None, D.index_set, D, max_terminal=args.max_terminal, validate=False)
    io.save_system(P, args.out)
    print(f"carrier size {P.n}")
    if args.check_axioms:
        return _report_axioms(P)
    return EXIT_OK


def _report_axioms(U) -> int:
    fail = equality_axiom_failure(U)
    print("equality axioms: " + ("hold" if fail is None else f"fail ({fail})"))
    return EXIT_OK if fail is None else EXIT_FAIL


def cmd_tower(args) -> int:
    from .harness.checks import tower_checks

    base = io.load_system(args.system, max_terminal=args.max_terminal) if args.system else None
    rep = tower_checks(args.depth, args.exponent, args.symbols, base=base)
    _dump_json(rep, args.report)
    print(f"sizes {rep['sizes']}")
    for e in rep["embeddings"]:
        print(f"{e['embedding']}: homomorphism={e['homomorphism']} approx_injective={e['approx_injective']}")
    cf = rep["closed_formulas"]
    print(f"closed formulas: {cf['count']} checked, {cf['base_true']} true in the base, "
          f"mismatches {sum(p['lost'] + p['gained'] for p in cf['levels'])}")
    print(f"{'PASS' if rep['passed'] else 'FAIL'} tower (report {args.report})")
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_verify(args) -> int:
    from .harness.suite import SUITES, SuiteConfig, run_suite, seed_from_env

    suites = tuple(args.suite) if args.suite else SUITES
    kw = {"seed": seed_from_env(args.seed), "suites": suites}
    if args.max_index is not None:
        kw["max_index"] = args.max_index
    if args.depth is not None:
        kw["tower_depth"] = args.depth
    if args.exponent is not None:
        kw["tower_exponent"] = args.exponent
    if args.quick:
        kw.update(normalization_triples=500, equivalence_triples=100, max_symbols=2, random_formulas=50,
                  constant_symbols=1, constant_random_formulas=20, exhaustive_index=1, tower_symbols=2)
    try:
        cfg = SuiteConfig(**kw)
        result = run_suite(cfg, progress=print if args.verbose else None)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not args.verbose:
        for line in result.summary_lines():
            print(line)
    for c in result.checks:
        if c["id"] == "counterexample-standard" and c["search"].get("witness"):
            w = c["search"]["witness"]
            print(f"standard-semantics witness: {json.dumps(w, sort_keys=True, ensure_ascii=False)}")
        if c["id"] == "tower":
            _dump_json(c, args.tower_report)
            print(f"tower report written to {args.tower_report}")
    with open(args.report, "wb") as fh:
        fh.write(result.report_bytes())
    print(f"{'PASS' if result.passed else 'FAIL'}: {len(result.checks)} checks, report {args.report}")
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_axioms(args) -> int:
    sig, lib = real_axis_library()
    rows = named_equality_axioms(sig) + lib if args.with_equality else lib
    if args.name:
        rows = [(n, f) for n, f in rows if n in args.name]
        unknown = set(args.name) - {n for n, _ in rows}
        if unknown:
            raise UsageError(f"unknown axiom names {sorted(unknown)}")
    if args.json:
        print(json.dumps([{"name": n, "formula": to_text(f)} for n, f in rows], indent=2, ensure_ascii=False))
    else:
        for n, f in rows:
            print(f"# {n}\n{to_text(f)}")
    return EXIT_OK


def cmd_examples(args) -> int:
    specs = [("fractions", {"kind": "fractions", "N": args.N}), ("segments", {"kind": "segments", "G": args.G}),
             ("mod2", {"kind": "mod2"})]
    if args.kind:
        specs = [s for s in specs if s[0] == args.kind]
    os.makedirs(args.out, exist_ok=True)
    for name, stanza in specs:
        path = os.path.join(args.out, f"{name}.json")
        if args.expand:
            U = {"fractions": lambda: make_fraction_system(args.N, max_terminal=args.max_terminal),
                 "segments": lambda: make_segment_system(args.G, max_terminal=args.max_terminal),
                 "mod2": lambda: two_element_field(max_terminal=args.max_terminal)}[name]()
            io.save_system(U, path)
            print(f"{path}: {U.n} elements")
        else:
            _dump_json({"generators": stanza}, path)
            print(f"{path}: generator {json.dumps(stanza, sort_keys=True)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infralog", description="Generalized second-order logic over finite systems.")
    p.add_argument("--max-terminal", type=int, default=DEFAULT_MAX_TERMINAL,
                   help="largest terminal that may be enumerated (default 2^20)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate formulas in a system")
    c.add_argument("system")
    c.add_argument("formula", help="a formula, or a file with one formula per line")
    c.add_argument("--evaluation", "-e")
    c.add_argument("--standard", action="store_true", help="read atoms as set-theoretic = and in")
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("infraproduct", help="build the infraproduct of a family over a filter")
    c.add_argument("family")
    c.add_argument("filter")
    c.add_argument("out")
    c.add_argument("--check-axioms", action="store_true")
    c.set_defaults(fn=cmd_infraproduct)

    c = sub.add_parser("infrapower", help="infrapower of one system over the filter's index set")
    c.add_argument("system")
    c.add_argument("filter")
    c.add_argument("out")
    c.add_argument("--check-axioms", action="store_true")
    c.set_defaults(fn=cmd_infrapower)

    c = sub.add_parser("tower", help="build a finite tower of infrapowers and check it")
    c.add_argument("system", nargs="?", help="base system (default: arithmetic modulo 2)")
    c.add_argument("--depth", type=int, default=2)
    c.add_argument("--exponent", type=int, default=2)
    c.add_argument("--symbols", type=int, default=3, help="logical-symbol bound for preserved closed formulas")
    c.add_argument("--report", default="tower-report.json")
    c.set_defaults(fn=cmd_tower)

    c = sub.add_parser("verify", help="run the verification suite")
    c.add_argument("--suite", action="append", help="suite name; repeatable (default: all)")
    c.add_argument("--max-index", type=int)
    c.add_argument("--depth", type=int)
    c.add_argument("--exponent", type=int)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--quick", action="store_true", help="small bounds for a fast smoke run")
    c.add_argument("--verbose", "-v", action="store_true")
    c.add_argument("--report", default="suite-report.json")
    c.add_argument("--tower-report", default="tower-report.json")
    c.set_defaults(fn=cmd_verify)

    c = sub.add_parser("axioms", help="print the real-axis axiom library")
    c.add_argument("--name", action="append")
    c.add_argument("--with-equality", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_axioms)

    c = sub.add_parser("examples", help="write the exemplar systems")
    c.add_argument("--out", default=".")
    c.add_argument("--kind", choices=["fractions", "segments", "mod2"])
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--G", type=int, default=1)
    c.add_argument("--expand", action="store_true", help="write explicit relations instead of a generator stanza")
    c.set_defaults(fn=cmd_examples)
    return p


INPUT_ERRORS = (SourceError, FormulaSyntaxError, FormulaTypeError, TypeSyntaxError, NotAFilter, InvalidSystem,
                SignatureMismatch, EvaluationError, UsageError)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceeded as e:
        print(f"infralog: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except INPUT_ERRORS as e:
        print(f"infralog: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
