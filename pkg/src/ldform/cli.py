"""Command-line interface: ``ldform <command> ...``.

Exit codes: 0 success, 2 parse error, 3 budget exhausted or Unknown,
4 internal invariant violation (or a failed ``check`` suite).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import divform as dfm
from .normalform import NormalForms, nf_to_json, nf_to_sexpr
from .oracle import DEFAULT_BUDGET, oracle_equal
from .rewrite import BudgetExhausted, common_reduct_search, ld_successors, trace_json
from .suites import SUITES
from .terms import (ParseError, enumerate_terms, iterate, parse, power_app, power_comp,
                    read_corpus, to_infix, to_sexpr, to_text)
from .verdict import Verdict

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4


class _Budget(Exception):
    pass


def _terms(arg: str, fmt: str = "auto"):
    """An inline term, or every term of a corpus file given as ``@path``."""
    if arg.startswith("@"):
        return read_corpus(arg[1:])
    return [parse(arg, fmt)]


def _one(arg: str, fmt: str = "auto"):
    ts = _terms(arg, fmt)
    if len(ts) != 1:
        raise ParseError("expected exactly one term", 0)
    return ts[0]


class _Run:
    """One invocation: output collection and tier bookkeeping."""

    def __init__(self, args):
        self.args = args
        self.eng = dfm.Engine()
        self.records: list[dict] = []

    def emit(self, op: str, inputs, text: str, result, before=None, cost=None):
        tier = None
        if before is not None:
            d = [a - b for a, b in zip(self.eng.stats.snapshot(), before)]
            tier = 3 if d[2] else 2 if d[1] else 1 if d[0] else 0
        if self.args.json:
            self.records.append({"op": op, "inputs": [to_infix(t) for t in inputs],
                                 "result": result, "tier_used": tier, "cost": cost})
        else:
            print(text)

    def flush(self):
        if self.args.json:
            out = self.records[0] if len(self.records) == 1 else self.records
            print(json.dumps(out, indent=None, ensure_ascii=False))


def cmd_parse(run, a):
    for t in _terms(a.term, a.format):
        run.emit("parse", [t], to_sexpr(t), to_sexpr(t))


def cmd_print(run, a):
    for t in _terms(a.term):
        s = to_text(t, a.format)
        run.emit("print", [t], s, s)


def cmd_cmp(run, a):
    for s in _terms(a.a):
        for t in _terms(a.b):
            before = run.eng.stats.snapshot()
            v = Verdict.from_sign(run.eng.lex(run.eng.of_term(s), run.eng.of_term(t)))
            run.emit("cmp", [s, t], str(v), str(v), before)


def cmd_eq(run, a):
    for s in _terms(a.a):
        for t in _terms(a.b):
            if a.oracle:
                r = oracle_equal(s, t, a.budget)
                run.emit("eq", [s, t], str(r.value), r.to_json(), cost=r.cost)
                if r.value is Verdict.UNKNOWN:
                    raise _Budget()
                continue
            before = run.eng.stats.snapshot()
            same = run.eng.of_term(s) is run.eng.of_term(t)
            text = "Equal" if same else "NotEqual"
            run.emit("eq", [s, t], text, text, before)


def cmd_df(run, a):
    for t in _terms(a.term):
        before = run.eng.stats.snapshot()
        d = run.eng.of_term(t)
        run.emit("df", [t], dfm.to_sexpr(d), dfm.to_json(d), before)


def cmd_div(run, a):
    p = _one(a.p)
    for w in _terms(a.q):
        before = run.eng.stats.snapshot()
        ep = run.eng.of_term(p)
        d = run.eng.divide_element(ep, run.eng.of_term(w))
        run.emit("div", [p, w], dfm.to_sexpr(d), dfm.to_json(d, ep), before)


def cmd_nf(run, a):
    p = _one(a.p)
    nf = NormalForms(run.eng)
    for w in _terms(a.w):
        before = run.eng.stats.snapshot()
        u = nf.of_element(run.eng.of_term(p), run.eng.of_term(w))
        run.emit("nf", [p, w], nf_to_sexpr(u), nf_to_json(u), before)


def cmd_rewrite(run, a):
    t = _one(a.term)
    steps = []
    for _ in range(a.steps):
        succ = ld_successors(t)
        if not succ:
            break
        steps.append(succ[0])
        t = succ[0].after
    text = "\n".join(f"{s.position or '.'}\t{s.rule}\t{to_infix(s.after)}" for s in steps)
    run.emit("rewrite", [_one(a.term)], text or to_infix(t), trace_json(steps), cost=len(steps))


def cmd_confluence(run, a):
    u, v = _one(a.u), _one(a.v)
    r = common_reduct_search(u, v, a.budget)
    if r is None:
        run.emit("confluence", [u, v], "Unknown", None, cost=a.budget)
        raise _Budget()
    result = {"meet": to_infix(r.meet), "left": trace_json(r.left_trace),
              "right": trace_json(r.right_trace)}
    run.emit("confluence", [u, v], to_infix(r.meet), result, cost=r.cost)


def cmd_iterate(run, a):
    x, y = _one(a.a), _one(a.b)
    t = iterate(x, y, a.n)
    run.emit("iterate", [x, y], to_infix(t), to_infix(t))


def cmd_power(run, a):
    p = _one(a.p)
    t = power_app(p, a.n) if a.kind == "app" else power_comp(p, a.n)
    run.emit("power", [p], to_infix(t), to_infix(t))


def cmd_enum(run, a):
    sizes = range(1, a.leaves + 1) if a.upto else [a.leaves]
    total = 0
    for n in sizes:
        ts = enumerate_terms(n, a.a_only)
        total += len(ts)
        if not a.count:
            for t in ts:
                run.emit("enum", [t], to_infix(t), to_infix(t))
        if a.count:
            run.emit("enum", [], f"{n}\t{len(ts)}", {"leaves": n, "count": len(ts)})
    if not a.json:
        print(f"# total {total}")


def cmd_findpow(run, a):
    p, q = _one(a.p), _one(a.q)
    before = run.eng.stats.snapshot()
    n = run.eng.find_power(run.eng.of_term(p), run.eng.of_term(q))
    run.emit("findpow", [p, q], str(n), n, before)


def cmd_check(run, a):
    ok = True
    for fn in SUITES[a.suite]:
        kw = {}
        if "budget" in fn.__code__.co_varnames:
            kw["budget"] = a.budget
        r = fn(**kw)
        ok &= r.passed
        run.emit("check", [], r.line(), {"suite": r.name, "passed": r.passed,
                                         "counts": r.counts,
                                         "failures": [list(map(str, f)) for f in r.failures]})
    if not ok:
        raise dfm.InvariantViolation("suite failed")


def build_parser() -> argparse.ArgumentParser:
    budget_default = int(os.environ.get("LDFORM_BUDGET", DEFAULT_BUDGET))
    ap = argparse.ArgumentParser(prog="ldform", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit JSON records")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, *pos, **extra):
        p = sub.add_parser(name)
        for arg in pos:
            p.add_argument(arg)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return p

    p = add("parse", cmd_parse, "term")
    p.add_argument("--format", choices=["auto", "infix", "sexpr"], default="auto")
    p = add("print", cmd_print, "term")
    p.add_argument("--format", choices=["infix", "sexpr"], default="infix")
    add("cmp", cmd_cmp, "a", "b")
    p = add("eq", cmd_eq, "a", "b")
    p.add_argument("--oracle", action="store_true", help="use the bounded oracle instead")
    p.add_argument("--budget", type=int, default=budget_default)
    add("df", cmd_df, "term")
    add("div", cmd_div, "p", "q")
    add("nf", cmd_nf, "p", "w")
    p = add("rewrite", cmd_rewrite, "term")
    p.add_argument("--steps", type=int, default=1)
    p = add("confluence", cmd_confluence, "u", "v")
    p.add_argument("--budget", type=int, default=budget_default)
    p = add("iterate", cmd_iterate, "a", "b")
    p.add_argument("n", type=int)
    p = add("power", cmd_power, "p")
    p.add_argument("n", type=int)
    p.add_argument("--kind", choices=["app", "comp"], default="app")
    p = add("enum", cmd_enum)
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--a-only", action="store_true")
    p.add_argument("--upto", action="store_true", help="all sizes 1..N")
    p.add_argument("--count", action="store_true", help="print counts only")
    add("findpow", cmd_findpow, "p", "q")
    p = add("check", cmd_check)
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--budget", type=int, default=budget_default)
    return ap


def _validate(args) -> None:
    for name in ("budget", "steps", "leaves"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name == "steps" else 1):
            raise ValueError(f"--{name} must be positive")
    if args.cmd == "power" and args.n < (0 if args.kind == "app" else 1):
        raise ValueError("power index out of range")
    if args.cmd == "iterate" and args.n < 1:
        raise ValueError("iterate index must be >= 1")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _validate(args)
    except ValueError as e:
        ap.error(str(e))
    run = _Run(args)
    code = EXIT_OK
    try:
        args.fn(run, args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        code = EXIT_PARSE
    except (_Budget, BudgetExhausted, dfm.NonTermination) as e:
        if str(e):
            print(f"budget exhausted: {e}", file=sys.stderr)
        code = EXIT_BUDGET
    except dfm.InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        code = EXIT_INVARIANT
    except OSError as e:
        print(f"cannot read input: {e}", file=sys.stderr)
        code = EXIT_PARSE
    run.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
