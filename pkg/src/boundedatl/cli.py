"""Command-line front end: ``check``, ``validate`` and ``gen``.

Exit codes: 0 Holds, 1 Fails, 2 Unknown, 3 usage, parse or validation error.
With several query states, any Fails gives 1, otherwise any Unknown gives 2.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import fixtures
from .checker import FAILS, HOLDS, UNKNOWN, CheckError, SemanticsSpec, evaluate, result_record
from .logic import FormulaSyntaxError, parse_formula
from .model import ModelError, parse_model, serialize_model, validate
from .strategy import format_dfst
from .turing import TuringMachineError

EXIT = {HOLDS: 0, FAILS: 1, UNKNOWN: 2}
USAGE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CheckError(f"cannot read {path}: {e.strerror}") from None


def _load_model(path, check=True):
    return parse_model(_read(path), check=check)


def overall_status(statuses) -> str:
    statuses = list(statuses)
    if FAILS in statuses:
        return FAILS
    if UNKNOWN in statuses:
        return UNKNOWN
    return HOLDS


def cmd_check(args, out) -> int:
    model = _load_model(args.model)
    formula = parse_formula(args.formula)
    sem = SemanticsSpec(
        memory=args.semantics, k=args.k, info=args.info, cap=args.max_k, jobs=args.jobs
    )
    states = [args.state] if args.state else None
    t0 = time.perf_counter()
    verdicts = evaluate(model, formula, sem, states)
    elapsed = time.perf_counter() - t0
    if args.json:
        for s, v in verdicts.items():
            rec = result_record(model, formula, sem, v, elapsed, witness=args.witness)
            print(json.dumps(rec, sort_keys=True), file=out)
    else:
        print(f"formula: {args.formula}", file=out)
        print(f"semantics: {sem.label(model)}", file=out)
        for v in verdicts.values():
            print(str(v), file=out)
            if args.witness and v.witness is not None:
                for _, d in sorted(v.witness.items()):
                    print(format_dfst(d), file=out)
        examined = sum(v.examined for v in verdicts.values())
        print(f"profiles examined: {examined}", file=out)
        print(f"elapsed: {elapsed:.3f}s", file=out)
    return EXIT[overall_status(v.status for v in verdicts.values())]


def cmd_validate(args, out) -> int:
    model = _load_model(args.model, check=False)
    problems = validate(model)
    if not problems:
        print("ok", file=out)
        return 0
    for p in problems:
        print(p, file=out)
    return USAGE_ERROR


def cmd_gen(args, out) -> int:
    if args.kind == "fig1":
        model = fixtures.fig1_model()
    elif args.kind == "fig2":
        model = fixtures.fig2_model()
    elif args.kind == "fig3":
        if args.k is None:
            raise CheckError("gen fig3 needs --k")
        model = fixtures.fig3_family(args.k)
    else:
        if args.tm is None:
            raise CheckError("gen tm needs --tm FILE")
        model = fixtures.tm_to_icgm(fixtures.tm_parse(_read(args.tm)))
    out.write(serialize_model(model))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boundedatl", description="ATL/ATL* model checking under memory-bounded strategies")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="evaluate a formula on a model")
    c.add_argument("--model", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--semantics", choices=["r", "Fk", "F", "R"], default="r")
    c.add_argument("--k", type=int, help="memory bound for Fk")
    c.add_argument("--max-k", type=int, dest="max_k", help="deepening cap for F and R")
    c.add_argument("--info", choices=["auto", "complete", "incomplete"], default="auto")
    c.add_argument("--state", help="query state (default: every state)")
    c.add_argument("--witness", action="store_true", help="print winning strategies")
    c.add_argument("--json", action="store_true", help="one JSON record per state")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate", help="check a model file for well-formedness")
    v.add_argument("model")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("gen", help="print a generated model")
    g.add_argument("kind", choices=["fig1", "fig2", "fig3", "tm"])
    g.add_argument("--k", type=int)
    g.add_argument("--tm", help="Turing machine file for kind tm")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ModelError, FormulaSyntaxError, CheckError, TuringMachineError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
