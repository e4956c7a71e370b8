"""Command line front end.

Exit codes:

    =====  ==========================================================
    0      check: formula holds; cex: vector already satisfies;
           allsat/dot/validate: success
    1      check: formula does not hold; cex: counterexample printed;
           validate: tree has violations
    2      usage, parse or validation error
    3      cex: formula is unsatisfiable, no counterexample exists
    =====  ==========================================================
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from . import __version__
from .analysis import AnalysisError, Analyzer
from .bdd import BddError
from .compiler import ScopeMode
from .fault_tree import (
    FaultTree,
    FaultTreeError,
    StatusVector,
    parse_fault_tree,
    to_dot,
    validate,
)
from .formula import FormulaError, Layer, format_formula, layer_of, parse_formula

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_ERROR = 2
EXIT_UNSAT = 3


class UsageError(Exception):
    pass


def read_tree_text(path: str) -> str:
    """Read a tree file; bare names of bundled trees (e.g. ``covid.ft``) also work."""
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    bundled = resources.files("bfl") / "trees" / path
    if os.sep not in path and bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise UsageError(f"no such tree file: {path}")


def load_tree(path: str) -> FaultTree:
    return parse_fault_tree(read_tree_text(path))


def parse_vector(ft: FaultTree, spec: list[str] | None, strict: bool) -> StatusVector | None:
    if spec is None:
        return None
    bits: dict[str, int] = {}
    for chunk in spec:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            name, sep, value = item.partition("=")
            name = name.strip().strip('"')
            value = value.strip()
            if not sep or value not in ("0", "1"):
                raise UsageError(f"bad vector entry {item!r}; expected name=0 or name=1")
            if name not in ft.elements:
                raise UsageError(f"unknown element {name!r} in vector")
            if not ft.is_basic(name):
                raise UsageError(f"{name!r} is not a basic event")
            if name in bits:
                raise UsageError(f"{name!r} given twice in vector")
            bits[name] = int(value)
    missing = [n for n in ft.be_order if n not in bits]
    if missing:
        if strict:
            raise UsageError(f"vector does not assign: {', '.join(missing)}")
        print(f"warning: unassigned basic events default to 0: {', '.join(missing)}", file=sys.stderr)
    return StatusVector.of(ft, bits)


def _report(args, **payload) -> dict:
    report = dict(payload)
    report.update(
        formula=getattr(args, "formula", None),
        scope=args.scope,
        tree=args.ft,
        version=__version__,
    )
    return report


def _emit_json(report: dict) -> None:
    print(json.dumps(report, indent=2))


def _vector_text(b: StatusVector) -> str:
    return ", ".join(f"{n}={v}" for n, v in zip(b.names, b.bits))


def cmd_check(args) -> int:
    ft = load_tree(args.ft)
    chi = parse_formula(args.formula, ft)
    b = parse_vector(ft, args.vector, args.strict_vector)
    if layer_of(chi) is Layer.VECTOR and b is None:
        raise UsageError("a first-layer formula needs a status vector (-v)")
    verdict = Analyzer(ft, args.scope).evaluate(chi, b)
    if args.json:
        _emit_json(_report(args, verdict=verdict.holds, layer=verdict.formula_layer.value))
    else:
        print(f"{format_formula(chi)}: {'holds' if verdict.holds else 'does not hold'}")
    return EXIT_HOLDS if verdict.holds else EXIT_FAILS


def cmd_allsat(args) -> int:
    ft = load_tree(args.ft)
    chi = parse_formula(args.formula, ft)
    if layer_of(chi) is Layer.TREE:
        raise UsageError("allsat needs a first-layer formula; use check for second-layer formulas")
    result = Analyzer(ft, args.scope).enumerate(chi)
    if args.expand:
        vectors = list(result.expand(args.limit))
        if args.json:
            _emit_json(_report(args, vectors=[v.as_dict() for v in vectors], count=len(vectors)))
        else:
            print(f"{len(vectors)} vector(s)")
            for v in vectors:
                print("{" + ", ".join(sorted(v.failed, key=ft.index)) + "}")
        return EXIT_HOLDS
    if args.json:
        _emit_json(_report(args, sets=result.to_json(), count=len(result), polarity=result.polarity))
        return EXIT_HOLDS
    label = "path set" if result.polarity == "operational" else "set"
    print(f"{len(result)} {label}(s)")
    for cube in result.cubes:
        line = "{" + ", ".join(result.reported(cube)) + "}"
        free = result.dont_care(cube)
        if free:
            line += "  don't care: " + ", ".join(free)
        print(line)
    return EXIT_HOLDS


def cmd_cex(args) -> int:
    ft = load_tree(args.ft)
    chi = parse_formula(args.formula, ft)
    if layer_of(chi) is Layer.TREE:
        raise UsageError("counterexamples exist only for first-layer formulas")
    b = parse_vector(ft, args.vector, args.strict_vector)
    if b is None:
        raise UsageError("cex needs a status vector (-v)")
    analyzer = Analyzer(ft, args.scope)
    if analyzer.evaluate(chi, b).holds:
        if args.json:
            _emit_json(_report(args, counterexample=None, status="satisfied"))
        else:
            print("vector already satisfies the formula")
        return EXIT_HOLDS
    cex = analyzer.counterexample(chi, b)
    if cex is None:
        if args.json:
            _emit_json(_report(args, counterexample=None, status="unsatisfiable"))
        else:
            print("formula is unsatisfiable: no counterexample exists")
        return EXIT_UNSAT
    if args.json:
        payload = {"revised": cex.revised.as_dict(), "flipped": list(cex.flipped)}
        _emit_json(_report(args, counterexample=payload, status="revised"))
    else:
        print(f"counterexample: {cex.revised}")
        print(f"  {_vector_text(cex.revised)}")
        print(f"flipped: {', '.join(cex.flipped)}")
    return EXIT_FAILS


def cmd_dot(args) -> int:
    ft = load_tree(args.ft)
    b = parse_vector(ft, args.vector, args.strict_vector)
    sys.stdout.write(to_dot(ft, b))
    return EXIT_HOLDS


def cmd_validate(args) -> int:
    ft = parse_fault_tree(read_tree_text(args.ft), check=False)
    report = validate(ft)
    if args.json:
        _emit_json(
            {
                "valid": not report,
                "violations": [{"kind": v.kind, "element": v.element, "message": v.message} for v in report],
                "basic_events": list(ft.be_order),
                "tree": args.ft,
                "version": __version__,
            }
        )
    elif report:
        for v in report:
            print(v.message)
    else:
        print(f"ok: {len(ft.gates)} gates, {len(ft.be_order)} basic events, top {ft.top}")
    return EXIT_FAILS if report else EXIT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bfl", description="Boolean fault tree logic model checker")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formula=True, vector=True):
        p.add_argument("--ft", required=True, metavar="PATH", help="fault tree file")
        if formula:
            p.add_argument("-f", "--formula", required=True, help="BFL formula")
        if vector:
            p.add_argument("-v", "--vector", action="append", metavar="NAME=0|1,...", help="status vector")
            p.add_argument("--strict-vector", action="store_true", help="every basic event must be assigned")
        p.add_argument("--scope", choices=[m.value for m in ScopeMode], default=ScopeMode.SUPPORT.value,
                       help="variables over which MCS/MPS minimality is judged")
        p.add_argument("--json", action="store_true", help="machine readable output")

    p = sub.add_parser("check", help="does the formula hold (for the vector)?")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("allsat", help="all satisfying vectors")
    common(p, vector=False)
    p.add_argument("--expand", action="store_true", help="multiply out don't-cares")
    p.add_argument("--limit", type=int, default=4096, help="maximum number of expanded vectors")
    p.set_defaults(func=cmd_allsat)

    p = sub.add_parser("cex", help="revise a violating vector")
    common(p)
    p.set_defaults(func=cmd_cex)

    p = sub.add_parser("dot", help="graphviz rendering of the tree")
    common(p, formula=False)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("validate", help="check well-formedness")
    common(p, formula=False, vector=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FaultTreeError, FormulaError, AnalysisError, BddError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
