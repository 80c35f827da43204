"""Command-line front-end: decide formulas, emit certificates, run suites.

Exit codes: 0 completed (the verdict is in the output document), 2 parse
error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

from .engine import DEFAULT_NODE_BUDGET, BudgetExceededError, SatResult, decide
from .formula import Formula, FormulaSyntaxError, neg, parse, print_formula
from .saturation import ALL_LOGICS, LogicId, logic_by_name

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3


def _add_logic_flags(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--logic", choices=sorted({l.name for l in ALL_LOGICS}),
                    help="named logic (mutually exclusive with the axiom flags)")
    ap.add_argument("--de", action="store_true", help="weak density axiom")
    ap.add_argument("--4a", dest="four_a", action="store_true", help="transitivity of the a-relation")
    ap.add_argument("--4b", dest="four_b", action="store_true", help="transitivity of the b-relation")


def _add_engine_flags(ap: argparse.ArgumentParser) -> None:
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--loop-detect", action="store_true", default=False,
                      help="terminate window chains by exact repetition (default)")
    mode.add_argument("--fuel", type=int, default=None, metavar="N",
                      help="terminate window chains by an explicit countdown")
    ap.add_argument("--budget-nodes", type=int, default=DEFAULT_NODE_BUDGET)
    ap.add_argument("--literal-loop-rule", action="store_true",
                    help="diagnostic: treat a repeated stack context as refutation")


def _add_io_flags(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("formula", nargs="?", help="formula text (omit to read stdin)")
    ap.add_argument("--file", help="read the formula from a file")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--text", action="store_true")


def _resolve_logic(args: argparse.Namespace) -> LogicId:
    flags_used = args.de or args.four_a or args.four_b
    if args.logic and flags_used:
        raise SystemExit("choose the logic either by name or by flags, not both")
    logic = logic_by_name(args.logic) if args.logic else LogicId(
        de=args.de, four_a=args.four_a, four_b=args.four_b)
    if logic.experimental:
        print(f"note: logic {logic.name} is experimental", file=sys.stderr)
    return logic


def _read_input(args: argparse.Namespace) -> str:
    if args.formula is not None and args.file:
        raise SystemExit("give the formula either inline or via --file, not both")
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    if args.formula is not None:
        return args.formula
    return sys.stdin.read()


def _engine_kwargs(args: argparse.Namespace) -> dict:
    if args.fuel is not None and args.fuel < 1:
        raise SystemExit("--fuel must be at least 1")
    return {
        "budget_nodes": args.budget_nodes,
        "fuel": args.fuel,
        "literal_loop_rule": args.literal_loop_rule,
    }


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(doc, indent=2, sort_keys=True))
        return
    print(f"result: {doc['result']}")
    if "formula" in doc:
        print(f"formula: {doc['formula']}")
    stats = doc.get("stats", {})
    if stats:
        pretty = ", ".join(f"{k}={v}" for k, v in sorted(stats.items()))
        print(f"stats: {pretty}")
    if "model" in doc:
        print("model: " + json.dumps(doc["model"], sort_keys=True))
    if "countermodel" in doc:
        print("countermodel: " + json.dumps(doc["countermodel"], sort_keys=True))


def _sat_doc(f: Formula, logic: LogicId, res: SatResult, with_model: bool) -> dict:
    doc: dict = {
        "formula": print_formula(f),
        "logic": logic.name,
        "result": "sat" if res.satisfiable else "unsat",
        "stats": res.stats.as_dict(),
    }
    if with_model and res.model is not None:
        doc["model"] = res.model.to_json()
    return doc


def cmd_sat(args: argparse.Namespace, with_model: bool) -> int:
    logic = _resolve_logic(args)
    try:
        f = parse(_read_input(args))
    except FormulaSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        res = decide(f, logic, **_engine_kwargs(args))
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit(_sat_doc(f, logic, res, with_model), args.json)
    return EXIT_OK


def cmd_valid(args: argparse.Namespace) -> int:
    logic = _resolve_logic(args)
    try:
        f = parse(_read_input(args))
    except FormulaSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        res = decide(neg(f), logic, **_engine_kwargs(args))
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    doc: dict = {
        "formula": print_formula(f),
        "logic": logic.name,
        "result": "invalid" if res.satisfiable else "valid",
        "stats": res.stats.as_dict(),
    }
    if res.model is not None:
        doc["countermodel"] = res.model.to_json()
    _emit(doc, args.json)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    logic = _resolve_logic(args)
    text = _read_input(args)
    lines = [ln.strip() for ln in text.splitlines()]
    formulas: list[tuple[str, Formula]] = []
    for i, ln in enumerate(lines, start=1):
        if not ln or ln.startswith("#"):
            continue
        try:
            formulas.append((ln, parse(ln)))
        except FormulaSyntaxError as exc:
            print(f"parse error on line {i}: {exc}", file=sys.stderr)
            return EXIT_PARSE
    rows = []
    agg_depth_ratio = 0.0
    try:
        for src, f in formulas:
            res = decide(f, logic, **_engine_kwargs(args))
            bound = 2 * f.size ** 4
            ratio = res.stats.max_stack_depth / bound if bound else 0.0
            agg_depth_ratio = max(agg_depth_ratio, ratio)
            rows.append({
                "formula": src,
                "result": "sat" if res.satisfiable else "unsat",
                "stats": res.stats.as_dict(),
                "stack_depth_bound": bound,
            })
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    doc = {
        "results": rows,
        "aggregate": {
            "formulas": len(rows),
            "sat": sum(1 for r in rows if r["result"] == "sat"),
            "unsat": sum(1 for r in rows if r["result"] == "unsat"),
            "max_stack_depth_over_bound": agg_depth_ratio,
        },
    }
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for r in rows:
            stats = r["stats"]
            print(f"{r['result']:>5}  depth={stats['max_stack_depth']:<4} "
                  f"nodes={stats['nodes_visited']:<6} {r['formula']}")
        agg = doc["aggregate"]
        print(f"total {agg['formulas']} formulas: {agg['sat']} sat, {agg['unsat']} unsat; "
              f"max stack depth / 2|u|^4 bound = {agg['max_stack_depth_over_bound']:.3g}")
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    ok = run_selftest(atoms=args.atoms, max_size=args.max_size,
                      max_worlds=args.max_worlds,
                      property_samples=args.property_samples,
                      verbose=not args.json)
    return EXIT_OK if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bitableau",
                                 description="satisfiability and validity for six bimodal logics")
    sub = ap.add_subparsers(dest="command", required=True)

    p_sat = sub.add_parser("sat", help="decide satisfiability")
    p_valid = sub.add_parser("valid", help="decide validity (dual of sat)")
    p_model = sub.add_parser("model", help="decide satisfiability and print a certified model")
    p_bench = sub.add_parser("bench", help="run a newline-delimited formula file")
    for p in (p_sat, p_valid, p_model, p_bench):
        _add_logic_flags(p)
        _add_engine_flags(p)
        _add_io_flags(p)

    p_self = sub.add_parser("selftest", help="oracle agreement and property suites")
    p_self.add_argument("--atoms", type=int, default=1)
    p_self.add_argument("--max-size", type=int, default=5)
    p_self.add_argument("--max-worlds", type=int, default=3)
    p_self.add_argument("--property-samples", type=int, default=2000)
    p_self.add_argument("--json", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sat":
        return cmd_sat(args, with_model=False)
    if args.command == "model":
        return cmd_sat(args, with_model=True)
    if args.command == "valid":
        return cmd_valid(args)
    if args.command == "bench":
        return cmd_bench(args)
    if args.command == "selftest":
        return cmd_selftest(args)
    raise AssertionError(args.command)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
