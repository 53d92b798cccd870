"""Cross-validation suites: the production comparator against the oracle,
the order axioms, division, products under the sharp relation, and normal
forms.  Each suite returns a :class:`SuiteResult`; the CLI ``check``
command and the acceptance tests both run these."""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field

from .divform import (APP_STAR, COMP_STAR, XDF, BudgetExhausted, Engine,
                      InvariantViolation, NonTermination, is_node, to_term)
from .normalform import NFLeaf, NormalForms, to_term_nf
from .oracle import OrderWitness, oracle_compare, oracle_equal
from .rewrite import common_reduct_search, ld_successors
from .terms import APP, COMP, Term, enumerate_upto, power_app, to_infix
from .verdict import Verdict


@dataclass
class SuiteResult:
    name: str
    passed: bool
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        stats = ", ".join(f"{k}={v}" for k, v in self.counts.items())
        return f"[{status}] {self.name} ({self.seconds:.1f}s) {stats}"


def _timed(fn):
    def run(*args, **kw):
        t0 = time.perf_counter()
        r = fn(*args, **kw)
        r.seconds = time.perf_counter() - t0
        return r
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _tiers(eng: Engine, before) -> dict:
    t1, t2, t3 = eng.stats.snapshot()
    return {"tier1": t1 - before[0], "tier2": t2 - before[1], "tier3": t3 - before[2]}


# ---------------------------------------------------------------------------
# 1, 2: canonical forms against the oracle


@_timed
def canonical_order(max_leaves: int = 6, budget: int = 1000, engine: Engine | None = None) -> SuiteResult:
    """Every pair of composition-free terms: compare_terms against the oracle."""
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves, a_only=True)
    dfs = [eng.of_term(t) for t in terms]
    c = Counter()
    fails = []
    for i, u in enumerate(terms):
        for j, v in enumerate(terms):
            r = oracle_compare(u, v, budget)
            c[f"oracle_{r.value.value.lower()}"] += 1
            c["witness" if isinstance(r.certificate, OrderWitness) else
              type(r.certificate).__name__.replace("Certificate", "").lower()] += 1
            if r.value is Verdict.UNKNOWN:
                continue
            if isinstance(r.certificate, OrderWitness):
                smaller = u if r.value is Verdict.LESS else v
                if not r.certificate.verify(smaller):
                    fails.append(("bad certificate", u, v))
            mine = eng.lex(dfs[i], dfs[j])
            if mine != r.value.sign():
                fails.append((to_infix(u), to_infix(v), mine, r.value.value))
    counts = {"terms": len(terms), "pairs": len(terms) ** 2, **dict(c),
              "disagreements": len(fails)}
    return SuiteResult("canonical order vs oracle", not fails, counts, fails[:20])


@_timed
def word_problem(max_leaves: int = 6, budget: int = 5000, engine: Engine | None = None) -> SuiteResult:
    """Equality classes from division forms against classes joined by
    common expansions."""
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves, a_only=True)
    parent = list(range(len(terms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    unknown_equal = 0
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            r = oracle_equal(terms[i], terms[j], budget, use_braids=False)
            if r.value is Verdict.EQUAL:
                parent[find(i)] = find(j)
    oracle_classes = {}
    for i in range(len(terms)):
        oracle_classes.setdefault(find(i), set()).add(i)
    df_classes = {}
    for i, t in enumerate(terms):
        df_classes.setdefault(eng.of_term(t), set()).add(i)
    a = sorted(map(sorted, oracle_classes.values()))
    b = sorted(map(sorted, df_classes.values()))
    fails = [] if a == b else [("partitions differ", len(a), len(b))]
    if a != b:
        unknown_equal = sum(1 for cl in b if cl not in a)
    counts = {"terms": len(terms), "oracle_classes": len(a), "df_classes": len(b),
              "mismatched_classes": unknown_equal}
    return SuiteResult("word problem classes", not fails, counts, fails)


# ---------------------------------------------------------------------------
# 3, 4: order axioms, sandwich, cancellation


@_timed
def order_axioms(max_leaves: int = 6, triples: int = 100_000, seed: int = 0,
                 engine: Engine | None = None) -> SuiteResult:
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves, a_only=True)
    dfs = [eng.of_term(t) for t in terms]
    n = len(dfs)
    fails = []
    table = [[eng.lex(dfs[i], dfs[j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            c = table[i][j]
            if c != -table[j][i]:
                fails.append(("antisymmetry", i, j))
            if (c == 0) != (dfs[i] is dfs[j]):
                fails.append(("equality is identity", i, j))
    rng = random.Random(seed)
    for _ in range(triples):
        i, j, k = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        if table[i][j] <= 0 and table[j][k] <= 0 and table[i][k] > 0:
            fails.append(("transitivity", i, j, k))
    counts = {"terms": n, "pairs": n * n, "triples": triples, "violations": len(fails)}
    return SuiteResult("linear order axioms", not fails, counts, fails[:20])


@_timed
def sandwich_cancellation(max_leaves: int = 4, engine: Engine | None = None) -> SuiteResult:
    """pr < p o r < ps whenever r < s, and left cancellation, for all triples."""
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves)
    dfs = [eng.of_term(t) for t in terms]
    n = len(dfs)
    order = [[eng.lex(a, b) for b in dfs] for a in dfs]
    fails = []
    sandwich = cancel = 0
    for p in dfs:
        pr = [eng.mul(XDF, p, r) for r in dfs]
        pcr = [eng.comp(XDF, p, r) for r in dfs]
        for i in range(n):
            for j in range(n):
                cancel += 1
                if eng.lex(pr[i], pr[j]) != order[i][j]:
                    fails.append(("cancellation", p, dfs[i], dfs[j]))
                if order[i][j] < 0:
                    sandwich += 1
                    if not (eng.lex(pr[i], pcr[i]) < 0 and eng.lex(pcr[i], pr[j]) < 0):
                        fails.append(("sandwich", p, dfs[i], dfs[j]))
    counts = {"terms": n, "sandwich_triples": sandwich, "cancellation_triples": cancel,
              "violations": len(fails)}
    return SuiteResult("sandwich and cancellation", not fails, counts, fails[:20])


# ---------------------------------------------------------------------------
# 5: confluence


@_timed
def confluence(max_leaves: int = 6, budget: int = 20000) -> SuiteResult:
    terms = enumerate_upto(max_leaves, a_only=True)
    fails = []
    pairs = 0
    worst = 0
    for t in terms:
        reducts = [s.after for s in ld_successors(t)]
        for i in range(len(reducts)):
            for j in range(i + 1, len(reducts)):
                if reducts[i] is reducts[j]:
                    continue
                pairs += 1
                r = common_reduct_search(reducts[i], reducts[j], budget)
                if r is None:
                    fails.append((to_infix(t), to_infix(reducts[i]), to_infix(reducts[j])))
                else:
                    worst = max(worst, r.cost)
    counts = {"terms": len(terms), "reduct_pairs": pairs, "max_cost": worst, "failures": len(fails)}
    return SuiteResult("confluence", not fails, counts, fails[:20])


# ---------------------------------------------------------------------------
# 6, 7: division and products


@_timed
def division(max_leaves: int = 4, budget: int = 20000, quotient_leaves: int = 4,
             engine: Engine | None = None) -> SuiteResult:
    """divide(p, w) is a valid p-DF, equals w by oracle certificate, and its
    first component is the greatest quotient among enumerated candidates."""
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves)
    cands = [eng.of_term(t) for t in enumerate_upto(quotient_leaves)]
    before = eng.stats.snapshot()
    fails = []
    c = Counter()
    for p in terms:
        ep = eng.of_term(p)
        for w in terms:
            ew = eng.of_term(w)
            try:
                d = eng.divide_element(ep, ew)
                eng.check(d, ep)
            except (InvariantViolation, BudgetExhausted, NonTermination) as e:
                fails.append(("divide", to_infix(p), to_infix(w), str(e)))
                continue
            r = oracle_equal(to_term(d), w, budget)
            if r.value is not Verdict.EQUAL or not r.certificate.verify():
                fails.append(("oracle", to_infix(p), to_infix(w)))
            else:
                c[r.certificate.to_json()["kind"]] += 1
            if is_node(d, ep):
                a0 = eng.element(d.comps[0], ep)
                c["quotient_checks"] += 1
                if eng.lex(eng.mul(XDF, ep, a0), ew) > 0:
                    fails.append(("quotient too large", to_infix(p), to_infix(w)))
                for a in cands:
                    if eng.lex(a0, a) < 0 and eng.lex(eng.mul(XDF, ep, a), ew) <= 0:
                        fails.append(("quotient not greatest", to_infix(p), to_infix(w)))
                        break
    counts = {"pairs": len(terms) ** 2, **dict(c), **_tiers(eng, before), "failures": len(fails)}
    return SuiteResult("division theorem", not fails, counts, fails[:20])


@_timed
def sharp_products(max_leaves: int = 5) -> SuiteResult:
    """Whenever u sharp v, both products use only the direct formulas and
    |uv| sharp u holds."""
    eng = Engine(audit=True)
    dfs = sorted({eng.of_term(t) for t in enumerate_upto(max_leaves)}, key=lambda d: d.size)
    work = Engine(audit=True)
    fails = []
    pairs = 0
    for u in dfs:
        for v in dfs:
            if work.sharp(XDF, u, v) is None:
                continue
            pairs += 1
            for is_comp in (False, True):
                before = work.stats.snapshot()
                r = work.comp(XDF, u, v) if is_comp else work.mul(XDF, u, v)
                t = _tiers(work, before)
                if t["tier2"] or t["tier3"]:
                    fails.append(("escaped tier 1", to_infix(to_term(u)), to_infix(to_term(v)), is_comp, t))
                if not is_comp and work.sharp(XDF, r, u) is None:
                    fails.append(("|uv| sharp u fails", to_infix(to_term(u)), to_infix(to_term(v))))
    counts = {"forms": len(dfs), "sharp_pairs": pairs, "tier1": work.stats.tier1,
              "tier2": work.stats.tier2, "tier3": work.stats.tier3,
              "descent_checks": work.descent_checks,
              "descent_violations": len(work.descent_violations), "failures": len(fails)}
    ok = not fails and not work.descent_violations
    return SuiteResult("sharp products (direct formulas)", ok, counts, fails[:20])


# ---------------------------------------------------------------------------
# 8: the laws map to identical forms


def law_instances(a: Term, b: Term, c: Term):
    yield "a o (b o c) = (a o b) o c", Term(COMP, a, Term(COMP, b, c)), Term(COMP, Term(COMP, a, b), c)
    yield "(a o b) c = a (b c)", Term(APP, Term(COMP, a, b), c), Term(APP, a, Term(APP, b, c))
    yield "a (b o c) = a b o a c", Term(APP, a, Term(COMP, b, c)), Term(COMP, Term(APP, a, b), Term(APP, a, c))
    yield "a o b = a b o a", Term(COMP, a, b), Term(COMP, Term(APP, a, b), a)
    yield "a (b c) = (a b)(a c)", Term(APP, a, Term(APP, b, c)), Term(APP, Term(APP, a, b), Term(APP, a, c))


@_timed
def congruence(max_leaves: int = 3, engine: Engine | None = None) -> SuiteResult:
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves)
    fails = []
    n = 0
    for a in terms:
        for b in terms:
            for c in terms:
                for name, lhs, rhs in law_instances(a, b, c):
                    n += 1
                    if eng.of_term(lhs) is not eng.of_term(rhs):
                        fails.append((name, to_infix(lhs), to_infix(rhs)))
    counts = {"instances": n, "mismatches": len(fails)}
    return SuiteResult("congruence under the laws", not fails, counts, fails[:20])


# ---------------------------------------------------------------------------
# 9, 10: normal forms and powers


@_timed
def normal_forms(max_p: int = 3, max_w: int = 5, budget: int = 20000,
                 oracle_leaves: int = 20) -> SuiteResult:
    nf = NormalForms(Engine())
    eng = nf.eng
    ps, ws = enumerate_upto(max_p), enumerate_upto(max_w)
    fails = []
    c = Counter()
    for p in ps:
        ep = eng.of_term(p)
        seen: dict = {}
        for w in ws:
            ew = eng.of_term(w)
            u = nf.of_element(ep, ew)
            try:
                nf.check(ep, u)
            except InvariantViolation as e:
                fails.append(("structure", to_infix(p), to_infix(w), str(e)))
            t = to_term_nf(p, u)
            if nf.value(ep, u) is not ew or eng.of_term(t) is not ew:
                fails.append(("round trip", to_infix(p), to_infix(w)))
            # independent certificate where the spelled NF stays small
            if t.leaves > oracle_leaves:
                c["oracle_skipped"] += 1
            else:
                r = oracle_equal(t, w, budget)
                if r.value is not Verdict.EQUAL or not r.certificate.verify():
                    fails.append(("oracle round trip", to_infix(p), to_infix(w)))
                else:
                    c[r.certificate.to_json()["kind"]] += 1
            c["leaf" if isinstance(u, NFLeaf) else "bare" if u.is_bare else "node"] += 1
            # same element <=> same NF
            prev = seen.setdefault(ew, u)
            if prev != u:
                fails.append(("not unique", to_infix(p), to_infix(w)))
        by_nf: dict = {}
        for w in ws:
            by_nf.setdefault(nf.of_element(ep, eng.of_term(w)), set()).add(eng.of_term(w))
        if any(len(s) > 1 for s in by_nf.values()):
            fails.append(("distinct elements share an NF", to_infix(p)))
    counts = {"pairs": len(ps) * len(ws), **dict(c), "failures": len(fails)}
    return SuiteResult("p-normal forms", not fails, counts, fails[:20])


@_timed
def powers(max_leaves: int = 3, engine: Engine | None = None) -> SuiteResult:
    eng = engine or Engine()
    terms = enumerate_upto(max_leaves)
    fails = []
    biggest = 0
    for p in terms:
        for q in terms:
            ep, eq = eng.of_term(p), eng.of_term(q)
            n = eng.find_power(ep, eq)
            biggest = max(biggest, n)
            if eng.lex(eng.of_term(power_app(p, n)), eq) <= 0:
                fails.append(("not above", to_infix(p), to_infix(q), n))
            if n > 0 and eng.lex(eng.of_term(power_app(p, n - 1)), eq) > 0:
                fails.append(("not least", to_infix(p), to_infix(q), n))
    counts = {"pairs": len(terms) ** 2, "max_n": biggest, "failures": len(fails)}
    return SuiteResult("least power above", not fails, counts, fails[:20])


SUITES = {
    "canonical": (canonical_order, word_problem),
    "thm1": (order_axioms, sandwich_cancellation, confluence, congruence, powers),
    "division": (division, sharp_products),
    "nf": (normal_forms,),
}
