"""Command line surface.

Every subcommand prints a JSON run report on stdout (or writes it to
``--report``).  Exit codes: 0 success, 1 a check failed, 2 a search budget
or precision cap ran out, 3 bad input.

Expression precedence, tightest first: ``^``, unary ``-``, ``* /``, ``+ -``;
binary operators associate to the left.
"""

import argparse
import json
import random
import sys
import time

from . import __version__
from .curves import verify_real_point_facts
from .errors import (
    BudgetExceeded, CodeOutOfDomain, ColumnNotRealized, DivisionByZero, ExprSyntaxError,
    InputError, NotAPoint, PrecisionCapExceeded, SymbolError, VertexOutOfRange,
)
from .expr import eval_expr, parse_expr, print_expr, symbols
from .functors import DEFAULT_BUDGET, SearchBudget, decoder_for, F_mor, G_mor, G_obj
from .graphs import GraphMorphism, GraphOracle, parse_graph, parse_morphism
from .presentation import (
    COLUMN, SEQUENTIAL, DumpPresentation, Presentation, dump_lines, parse_permutation,
    random_swaps, scramble,
)
from .real import DEFAULT_CAP, DEFAULT_PREC, RealCtx, compare
from .tower import Tower

REPORT_SCHEMA = "graphfield-report/1"
EXIT_OK, EXIT_CHECK, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

INPUT_ERRORS = (InputError, ExprSyntaxError, SymbolError, VertexOutOfRange, DivisionByZero,
                CodeOutOfDomain, ColumnNotRealized, OSError)
BUDGET_ERRORS = (BudgetExceeded, PrecisionCapExceeded)


class CheckFailed(Exception):
    def __init__(self, message, witnesses=None):
        super().__init__(message)
        self.witnesses = witnesses or {}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _graph(args):
    return parse_graph(_read(args.graph))


def _mode(args):
    return SEQUENTIAL if getattr(args, "mode", "column") == "sequential" else COLUMN


def _budget(args):
    return SearchBudget(args.budget, args.total_budget)


def _permutation(args, F):
    if args.permutation:
        perm = parse_permutation(_read(args.permutation))
    else:
        perm = random_swaps(F, args.swaps, args.swap_bound, random.Random(args.seed))
    perm.check(F)
    return perm


def _source(args):
    """Presentation named by ``--graph`` or ``--dump``, optionally scrambled."""
    if bool(args.graph) == bool(args.dump):
        raise InputError("give exactly one of --graph or --dump")
    if args.dump:
        F = DumpPresentation(_read(args.dump))
        desc = {"dump": args.dump}
    else:
        F = Presentation(_graph(args), _mode(args))
        desc = {"graph": F.describe(), "mode": F.mode}
    if getattr(args, "permutation", None) or getattr(args, "swaps", 0):
        perm = _permutation(args, F)
        F = scramble(F, perm)
        desc["permutation"] = perm.to_json()
    return F, desc


# subcommands

def cmd_build(args, report):
    G = _graph(args)
    F = Presentation(G, _mode(args))
    count = _write_dump(F, args.bound, args.out)
    report["inputs"].update(graph=G.describe(), mode=F.mode, bound=args.bound, out=args.out)
    report["witnesses"] = {"lines": count, "zero": F.zero, "one": F.one}


def _write_dump(F, bound, out):
    count = 0
    with open(out, "w") as fh:
        for line in dump_lines(F, bound):
            fh.write(line + "\n")
            count += 1
    return count


def _decode(F, n, budget):
    D = decoder_for(F, budget)
    points = [list(D.point(i)) for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i):
            is_edge, point, m = D.decide_pair(i, j)
            pairs.append({"pair": [i, j], "edge": is_edge, "point": list(point), "m": m})
    H = G_obj(F, n, budget)
    return H, {"points": points, "pairs": pairs}


def cmd_decode(args, report):
    F, desc = _source(args)
    budget = _budget(args)
    report["inputs"].update(desc, vertices=args.vertices)
    H, wit = _decode(F, args.vertices, budget)
    report["witnesses"] = wit
    report["result"] = {"edges": [list(e) for e in H.edges()]}
    report["budgets"]["used"] = budget.used


def cmd_roundtrip(args, report):
    G = _graph(args)
    n = args.vertices if args.vertices is not None else G.n
    if n is None:
        raise InputError("an infinite graph needs --vertices")
    native = Presentation(G, _mode(args))
    F, perm = native, None
    desc = {"graph": G.describe(), "mode": native.mode, "vertices": n}
    if args.permutation or args.swaps:
        perm = _permutation(args, native)
        F = scramble(native, perm)
        desc["permutation"] = perm.to_json()
    report["inputs"].update(desc)
    budget = _budget(args)
    H, wit = _decode(F, n, budget)
    report["witnesses"] = wit
    report["budgets"]["used"] = budget.used
    # decoded vertex k is the original vertex whose point is carried to the k-th point
    labels = list(range(n))
    if perm is not None:
        D = decoder_for(native, budget)
        labels = [D.index_of(tuple(perm.inverse(c) for c in pt)) for pt in wit["points"]]
        report["witnesses"]["original_vertex"] = labels
        if None in labels or sorted(labels) != list(range(n)):
            raise CheckFailed("decoded points do not correspond to the original vertices")
    want = sorted(tuple(sorted((labels[i], labels[j]), reverse=True)) for i, j in H.edges())
    got = G.edges(n)
    report["result"] = {"expected": [list(e) for e in got], "decoded": [list(e) for e in H.edges()],
                        "decoded_relabeled": [list(e) for e in want]}
    if want != got:
        raise CheckFailed("decoded graph differs from the input")


def cmd_transport(args, report):
    G = _graph(args)
    G2 = parse_graph(_read(args.target)) if args.target else G
    g = parse_morphism(_read(args.morphism))
    n = args.vertices if args.vertices is not None else (g.size or G.n)
    if n is None:
        raise InputError("a rule morphism needs --vertices")
    g.check(G, G2, n)
    budget = _budget(args)
    F, F2 = Presentation(G), Presentation(G2)
    f = F_mor(G, G2, g, F, F2, budget)
    rng = random.Random(args.seed)
    codes = [c for c in range(args.bound) if F.in_domain(c)]
    failures = []
    for _ in range(args.samples):
        a, b = rng.choice(codes), rng.choice(codes)
        for name in ("add", "mul"):
            lhs = f(getattr(F, name)(a, b))
            rhs = getattr(F2, name)(f(a), f(b))
            if lhs != rhs:
                failures.append({"op": name, "a": a, "b": b})
    back = G_mor(F, F2, f, n, budget)
    want = GraphMorphism(images=[g(i) for i in range(n)])
    report["inputs"].update(graph=G.describe(), target=G2.describe(), morphism=g.to_json(),
                            vertices=n, samples=args.samples, seed=args.seed, bound=args.bound)
    report["witnesses"] = {
        "generator_images": {f"u{i}": [F.encode_raw(F.tower.u_raw(i)), f(F.encode_raw(F.tower.u_raw(i)))]
                             for i in range(n)},
        "op_failures": failures,
    }
    report["result"] = {"recovered": back.to_json(), "expected": want.to_json(),
                        "ops_preserved": not failures}
    report["budgets"]["used"] = budget.used
    if failures or back != want:
        raise CheckFailed("transport check failed")


def cmd_order(args, report):
    if len(args.expr) != 2:
        raise InputError("order takes exactly two --expr arguments")
    trees = [parse_expr(t) for t in args.expr]
    if args.graph:
        G = _graph(args)
    else:
        used = [s.i for t in trees for s in symbols(t)]
        G = GraphOracle.finite(max(used) + 1 if used else 1)
    T = Tower(G)
    a, b = (eval_expr(t, T) for t in trees)
    ctx = RealCtx(T, cap=args.cap)
    answer, ia, ib = compare(a, b, ctx, args.prec)
    report["inputs"].update(graph=G.describe(), expr=[print_expr(t) for t in trees], prec=args.prec)
    report["result"] = {"answer": answer}
    report["witnesses"] = {"enclosures": None if ia is None else [ia.to_json(), ib.to_json()],
                           "decided_at_bits": None if ia is None else ia.prec,
                           "symbolic": ia is None}


def cmd_verify_curves(args, report):
    checks = verify_real_point_facts()
    report["witnesses"] = {"checks": checks}
    report["result"] = {"passed": sum(c["status"] == "pass" for c in checks), "total": len(checks)}
    if any(c["status"] != "pass" for c in checks):
        raise CheckFailed("a curve check failed")


def cmd_scramble(args, report):
    F, desc = _source(args)
    perm = desc.get("permutation")
    if perm is None:
        raise InputError("scramble needs --permutation or --swaps")
    count = _write_dump(F, args.bound, args.out)
    report["inputs"].update(desc, bound=args.bound, out=args.out)
    report["witnesses"] = {"lines": count, "zero": F.zero, "one": F.one}


def _add_graph(p, required=True):
    p.add_argument("--graph", required=required, help="graph file ('-' for stdin)")


def _add_mode(p):
    p.add_argument("--mode", choices=("column", "sequential"), default="column",
                   help="code layout (default: column-faithful)")


def _add_budget(p):
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="candidates per search")
    p.add_argument("--total-budget", type=int, default=None, help="candidates over the whole run")


def _add_scramble(p):
    p.add_argument("--permutation", help="permutation JSON file: swap list or {'rule': name}")
    p.add_argument("--swaps", type=int, default=0, help="number of random transpositions")
    p.add_argument("--swap-bound", type=int, default=200, help="random swaps act below this code")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="graphfield", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"graphfield {__version__}")
    parser.add_argument("--report", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("build", help="dump the coded field of a graph")
    _add_graph(p)
    _add_mode(p)
    p.add_argument("--bound", type=int, default=64, help="dump all codes below this bound")
    p.add_argument("--out", required=True, help="dump file")
    p.set_defaults(run=cmd_build)

    p = sub.add_parser("decode", help="recover the graph from a presentation")
    _add_graph(p, required=False)
    p.add_argument("--dump", help="presentation dump file")
    _add_mode(p)
    _add_scramble(p)
    p.add_argument("--vertices", type=int, required=True)
    _add_budget(p)
    p.set_defaults(run=cmd_decode)

    p = sub.add_parser("roundtrip", help="decode the built field and compare with the input graph")
    _add_graph(p)
    _add_mode(p)
    _add_scramble(p)
    p.add_argument("--vertices", type=int)
    _add_budget(p)
    p.set_defaults(run=cmd_roundtrip)

    p = sub.add_parser("transport", help="spot-check the field map of a graph morphism")
    _add_graph(p)
    p.add_argument("--target", help="target graph file (default: the source graph)")
    p.add_argument("--morphism", required=True, help="morphism JSON file")
    p.add_argument("--vertices", type=int)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--bound", type=int, default=400, help="sample codes below this bound")
    p.add_argument("--seed", type=int, default=0)
    _add_budget(p)
    p.set_defaults(run=cmd_transport)

    p = sub.add_parser("order", help="compare two elements under the real embedding")
    _add_graph(p, required=False)
    p.add_argument("--expr", action="append", default=[], help="element expression (give twice)")
    p.add_argument("--prec", type=int, default=DEFAULT_PREC, help="starting precision in bits")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="precision cap in bits")
    p.set_defaults(run=cmd_order)

    p = sub.add_parser("verify-curves", help="check the finitely many curve facts")
    p.set_defaults(run=cmd_verify_curves)

    p = sub.add_parser("scramble", help="dump a conjugated copy of a presentation")
    _add_graph(p, required=False)
    p.add_argument("--dump", help="presentation dump file")
    _add_mode(p)
    _add_scramble(p)
    p.add_argument("--bound", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_scramble)
    return parser


def _emit(report, path, stream):
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        stream.write(text + "\n")


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    report = {"schema": REPORT_SCHEMA, "command": None, "inputs": {}, "outcome": None,
              "budgets": {}, "timings": {}, "witnesses": {}}
    report_path = None
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        report_path = args.report
        if args.command is None:
            raise InputError("missing subcommand")
        report["command"] = args.command
        if hasattr(args, "budget"):
            report["budgets"] = {"per_call": args.budget, "total": args.total_budget}
        args.run(args, report)
        report["outcome"], code = "ok", EXIT_OK
    except CheckFailed as exc:
        report["outcome"], code = "check-failed", EXIT_CHECK
        report["error"] = str(exc)
    except NotAPoint as exc:
        report["outcome"], code = "check-failed", EXIT_CHECK
        report["error"] = str(exc)
    except BUDGET_ERRORS as exc:
        report["outcome"], code = "budget-exhausted", EXIT_BUDGET
        report["error"] = f"{type(exc).__name__}: {exc}"
    except INPUT_ERRORS as exc:
        report["outcome"], code = "input-error", EXIT_INPUT
        report["error"] = f"{type(exc).__name__}: {exc}"
        if isinstance(exc, ExprSyntaxError):
            report["error_offset"] = exc.offset
    report["exit_code"] = code
    report["timings"] = {"seconds": round(time.perf_counter() - start, 3)}
    _emit(report, report_path, stdout)
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
