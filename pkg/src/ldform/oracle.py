"""Bounded, certificate-producing checks of equality and of the left order.

The oracle never consults division forms.  Its verdicts come with
certificates that can be replayed law by law:

* ``Equal`` carries a path of single rewriting steps from ``u`` to ``v``
  (a common expansion for composition-free terms; for terms with
  composition the path runs through right-nested composition lists);
* ``Less``/``Greater`` carries a representative of the larger term, a path
  to it, and a left factor of it proved equal to the smaller term.

When a search for composition-free terms runs out of budget, the braid
model (``braids``) can settle the question exactly; the certificate then
records that route instead of a path.  Laver-table values filter candidate
pairs, and also refute equality outright when they differ.

``Unknown`` is returned when the budget is spent, never as a guess.
"""

from __future__ import annotations

import heapq
import itertools
import os
from collections import deque
from dataclasses import dataclass, field

from . import laver
from .braids import braid_compare, braid_of, handle_reduce, inverse
from .rewrite import (INVERSE_RULE, RewriteStep, SIGMA_RULES, apply_rule,
                      common_reduct_search, ld_successors)
from .terms import APP, COMP, GEN, Term, at, is_A, left_prefixes, subterms, to_infix
from .verdict import Verdict

DEFAULT_BUDGET = int(os.environ.get("LDFORM_BUDGET", "20000"))


# ---------------------------------------------------------------------------
# certificates


def invert_steps(steps: list[RewriteStep]) -> list[RewriteStep]:
    """The same path walked backwards, each step replaced by its inverse."""
    return [RewriteStep(s.position, INVERSE_RULE[s.rule], s.after, s.before)
            for s in reversed(steps)]


def replay(start: Term, steps: list[RewriteStep]) -> Term:
    """Re-apply every step from ``start``; raises ValueError on a bad step."""
    t = start
    for s in steps:
        if s.before is not t:
            raise ValueError(f"step at {s.position!r} does not start from the current term")
        nxt = apply_rule(t, s.position, s.rule)
        if nxt is None or nxt is not s.after:
            raise ValueError(f"rule {s.rule} does not apply at {s.position!r}")
        t = nxt
    return t


@dataclass
class EqualityCertificate:
    """A rewriting path from ``start`` to ``end``.

    ``braid_pairs`` lists component pairs whose equality was settled in the
    braid model rather than by rewriting; the path then stops at ``middle``
    on the left and resumes from ``middle_right``.
    """

    start: Term
    end: Term
    steps: list[RewriteStep]
    braid_pairs: list[tuple[Term, Term]] = field(default_factory=list)
    right_steps: list[RewriteStep] = field(default_factory=list)

    def verify(self) -> bool:
        try:
            mid = replay(self.start, self.steps)
            if not self.braid_pairs:
                return mid is self.end
            if replay(self.right_steps[0].before if self.right_steps else self.end,
                      self.right_steps) is not self.end:
                return False
            other = self.right_steps[0].before if self.right_steps else self.end
            return _same_shape_modulo(mid, other, self.braid_pairs)
        except ValueError:
            return False

    def to_json(self) -> dict:
        out = {"kind": "sigma_path", "start": to_infix(self.start), "end": to_infix(self.end),
               "steps": [s.to_json() for s in self.steps]}
        if self.braid_pairs:
            out["kind"] = "sigma_path+braid"
            out["braid_pairs"] = [[to_infix(a), to_infix(b)] for a, b in self.braid_pairs]
            out["right_steps"] = [s.to_json() for s in self.right_steps]
        return out


def _same_shape_modulo(a: Term, b: Term, pairs) -> bool:
    """``a`` and ``b`` are composition lists whose components agree, either
    syntactically or as a listed pair that is equal in the braid model."""
    ca, cb = comp_list(a), comp_list(b)
    if len(ca) != len(cb):
        return False
    listed = set(pairs)
    for x, y in zip(ca, cb):
        if x is y:
            continue
        if (x, y) not in listed or braid_compare(x, y) != 0:
            return False
    return True


@dataclass
class BraidCertificate:
    """The reduced braid word of ``u^-1 v``: empty for equality, otherwise its
    sign decides the order."""

    word: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": "braid", "reduced_word": list(self.word)}


@dataclass
class OrderWitness:
    """``rep`` equals the larger term via ``path``; ``factor`` is a left factor
    of ``rep`` and ``equality`` shows it equals the smaller term."""

    larger: Term
    rep: Term
    path: list[RewriteStep]
    factor: Term
    equality: EqualityCertificate | BraidCertificate | None

    def verify(self, smaller: Term) -> bool:
        try:
            if replay(self.larger, self.path) is not self.rep:
                return False
        except ValueError:
            return False
        if self.factor not in set(left_prefixes(self.rep)):
            return False
        if self.factor is smaller:
            return True
        if isinstance(self.equality, EqualityCertificate):
            return (self.equality.start is smaller and self.equality.end is self.factor
                    and self.equality.verify())
        if isinstance(self.equality, BraidCertificate):
            return braid_compare(smaller, self.factor) == 0
        return False

    def to_json(self) -> dict:
        return {"kind": "left_factor", "rep": to_infix(self.rep), "factor": to_infix(self.factor),
                "path": [s.to_json() for s in self.path],
                "equality": None if self.equality is None else self.equality.to_json()}


@dataclass
class OracleVerdict:
    value: Verdict
    certificate: object | None = None
    cost: int = 0

    def to_json(self) -> dict:
        cert = self.certificate
        return {"value": str(self.value), "cost": self.cost,
                "certificate": cert.to_json() if hasattr(cert, "to_json") else cert}


# ---------------------------------------------------------------------------
# composition lists


def comp_list(t: Term) -> list[Term]:
    """Components of a right-nested composition ``a_1 o (a_2 o ...)``."""
    out = []
    while t.kind == COMP:
        out.append(t.left)
        t = t.right
    out.append(t)
    return out


_FLATTEN_RULES = ("comp_apply", "dist_comp", "assoc_right")


def flatten(t: Term) -> tuple[Term, list[RewriteStep]]:
    """Rewrite ``t`` to a right-nested composition of composition-free terms,
    using (a o b)c -> a(bc), a(b o c) -> ab o ac and right association."""
    steps: list[RewriteStep] = []
    while True:
        found = None
        for pos, s in subterms(t):
            for name in _FLATTEN_RULES:
                r = SIGMA_RULES[name](s)
                if r is not None:
                    found = (pos, name)
                    break
            if found:
                break
        if found is None:
            return t, steps
        nxt = apply_rule(t, *found)
        steps.append(RewriteStep(found[0], found[1], t, nxt))
        t = nxt


def _swap_steps(t: Term, i: int) -> list[RewriteStep]:
    """Steps turning components ``a_i, a_{i+1}`` into ``a_i a_{i+1}, a_i``."""
    pos = "R" * i
    sub = at(t, pos)
    steps = []
    cur = t
    if sub.right.kind == COMP:
        seq = [(pos, "assoc_left"), (pos + "L", "comp_swap"), (pos, "assoc_right")]
    else:
        seq = [(pos, "comp_swap")]
    for p, rule in seq:
        nxt = apply_rule(cur, p, rule)
        steps.append(RewriteStep(p, rule, cur, nxt))
        cur = nxt
    return steps


def _build_comp(parts: list[Term]) -> Term:
    t = parts[-1]
    for a in reversed(parts[:-1]):
        t = Term(COMP, a, t)
    return t


def _key(parts) -> tuple[int, ...]:
    return tuple(laver.value(c) for c in parts)


def _shift_steps(steps: list[RewriteStep], pos: str, whole: Term) -> list[RewriteStep]:
    """Lift steps on the subterm at ``pos`` to steps on ``whole``."""
    from .terms import replace_at
    out = []
    cur = whole
    for s in steps:
        nxt = replace_at(cur, pos, s.after)
        out.append(RewriteStep(pos + s.position, s.rule, cur, nxt))
        cur = nxt
    return out


# ---------------------------------------------------------------------------
# equality


class _Budget:
    def __init__(self, total: int):
        self.total = total
        self.used = 0

    @property
    def left(self) -> int:
        return max(0, self.total - self.used)


def _ld_equal(a: Term, b: Term, budget: _Budget, use_braids: bool):
    """Equality of composition-free terms: a path, a braid certificate or None."""
    res = common_reduct_search(a, b, max(1, budget.left))
    if res is not None:
        budget.used += res.cost
        return res.left_trace + invert_steps(res.right_trace)
    budget.used = budget.total
    if use_braids and braid_compare(a, b) == 0:
        return BraidCertificate(())
    return None


def oracle_equal(u: Term, v: Term, budget: int = DEFAULT_BUDGET, *,
                 use_braids: bool = True) -> OracleVerdict:
    """``Equal`` with a certificate when one is found within ``budget``."""
    if u is v:
        return OracleVerdict(Verdict.EQUAL, EqualityCertificate(u, v, []), 0)
    if laver.value(u) != laver.value(v):
        return OracleVerdict(Verdict.UNKNOWN, {"kind": "laver_separated",
                                               "values": [laver.value(u), laver.value(v)]}, 0)
    b = _Budget(budget)
    if is_A(u) and is_A(v):
        cert = _ld_equal(u, v, b, use_braids)
        if cert is None:
            return OracleVerdict(Verdict.UNKNOWN, None, b.used)
        if isinstance(cert, BraidCertificate):
            ec = EqualityCertificate(u, v, [], [(u, v)], [])
            return OracleVerdict(Verdict.EQUAL, ec, b.used)
        return OracleVerdict(Verdict.EQUAL, EqualityCertificate(u, v, cert), b.used)
    cert = _list_equal(u, v, b, use_braids)
    if cert is None:
        return OracleVerdict(Verdict.UNKNOWN, None, b.used)
    return OracleVerdict(Verdict.EQUAL, cert, b.used)


def _list_equal(u: Term, v: Term, b: _Budget, use_braids: bool, size_factor: int = 3,
                component_budget: int = 2000):
    """Search composition lists of ``u`` and ``v`` for a componentwise match."""
    fu, su = flatten(u)
    fv, sv = flatten(v)
    if len(comp_list(fu)) != len(comp_list(fv)):
        return None
    cap = size_factor * max(u.leaves, v.leaves, fu.leaves, fv.leaves)
    parents = [{fu: None}, {fv: None}]
    bykey = [{}, {}]
    roots = [_key(comp_list(fu)), _key(comp_list(fv))]
    for side, t in ((0, fu), (1, fv)):
        bykey[side].setdefault(roots[side], []).append(t)

    def path(side, t):
        steps = []
        while parents[side][t] is not None:
            prev, block = parents[side][t]
            steps[:0] = block
            t = prev
        return steps

    def try_match(t0: Term, t1: Term):
        c0, c1 = comp_list(t0), comp_list(t1)
        left = su + path(0, t0)
        right = sv + path(1, t1)
        cur = t0
        braid_pairs = []
        if use_braids and any(a is not c and braid_compare(a, c) != 0 for a, c in zip(c0, c1)):
            # an exact rejection saves a hopeless expansion search
            return None
        for i, (a, c) in enumerate(zip(c0, c1)):
            if a is c:
                continue
            sb = _Budget(max(1, min(b.left, component_budget)))
            sub = _ld_equal(a, c, sb, use_braids)
            b.used += sb.used
            if sub is None:
                return None
            if isinstance(sub, BraidCertificate):
                braid_pairs.append((a, c))
                continue
            pos = "R" * i + ("L" if i < len(c0) - 1 else "")
            lifted = _shift_steps(sub, pos, cur)
            left += lifted
            if lifted:
                cur = lifted[-1].after
        if braid_pairs:
            return EqualityCertificate(u, v, left, braid_pairs, invert_steps(right))
        return EqualityCertificate(u, v, left + invert_steps(right))

    if roots[0] == roots[1]:
        cert = try_match(fu, fv)
        if cert is not None:
            return cert

    # best first: states agreeing with the other side's starting list in
    # more positions go first, then shallower ones
    def score(side, key, depth):
        target = roots[1 - side]
        return (sum(a != c for a, c in zip(key, target)), depth)

    tick = itertools.count()
    heaps = [[(score(0, roots[0], 0), next(tick), fu, 0)],
             [(score(1, roots[1], 0), next(tick), fv, 0)]]
    side = 0
    while heaps[0] or heaps[1]:
        if not heaps[side]:
            side = 1 - side
        if b.used >= b.total:
            return None
        b.used += 1
        _, _, t, depth = heapq.heappop(heaps[side])
        parts = comp_list(t)
        for i in range(len(parts) - 1):
            steps = _swap_steps(t, i)
            s = steps[-1].after
            if s in parents[side] or s.leaves > cap:
                continue
            parents[side][s] = (t, steps)
            k = _key(comp_list(s))
            bykey[side].setdefault(k, []).append(s)
            for other in bykey[1 - side].get(k, ()):
                cert = try_match(s, other) if side == 0 else try_match(other, s)
                if cert is not None:
                    return cert
            heapq.heappush(heaps[side], (score(side, k, depth + 1), next(tick), s, depth + 1))
        side = 1 - side
    return None


# ---------------------------------------------------------------------------
# order


def oracle_compare(u: Term, v: Term, budget: int = DEFAULT_BUDGET, *,
                   use_braids: bool = True) -> OracleVerdict:
    """Less/Greater with a left-factor witness, Equal with a path, or Unknown."""
    eq = oracle_equal(u, v, budget // 2, use_braids=use_braids)
    if eq.value is Verdict.EQUAL:
        return eq
    b = _Budget(budget - eq.cost)
    r = _witness_search(u, v, b, use_braids)
    if r is not None:
        return OracleVerdict(r[0], r[1], eq.cost + b.used)
    if use_braids and is_A(u) and is_A(v):
        s = braid_compare(u, v)
        word = handle_reduce(inverse(braid_of(u)) + braid_of(v))
        return OracleVerdict(Verdict.from_sign(s), BraidCertificate(word), eq.cost + b.used)
    return OracleVerdict(Verdict.UNKNOWN, None, eq.cost + b.used)


def _reps(t: Term):
    """Representatives of ``t`` with paths: expansions for composition-free
    terms, composition lists and their swaps otherwise."""
    if is_A(t):
        parents = {t: None}
        queue = deque([t])
        while queue:
            s = queue.popleft()
            yield s, parents
            for step in ld_successors(s):
                if step.after not in parents:
                    parents[step.after] = step
                    queue.append(step.after)
        return
    f, fsteps = flatten(t)
    parents = {t: None}
    for st in fsteps:
        parents[st.after] = st
    queue = deque([f])
    seen = {f}
    while queue:
        s = queue.popleft()
        yield s, parents
        parts = comp_list(s)
        for i in range(len(parts) - 1):
            steps = _swap_steps(s, i)
            n = steps[-1].after
            if n in seen:
                continue
            seen.add(n)
            for st in steps:
                parents.setdefault(st.after, st)
            queue.append(n)


def _path_to(parents, t: Term) -> list[RewriteStep]:
    steps = []
    while parents[t] is not None:
        st = parents[t]
        steps.append(st)
        t = st.before
    steps.reverse()
    return steps


def _factors(rep: Term):
    """Left factors of ``rep``, plus prefixes of a composition list made
    literal by re-association.  Yields (new_rep, extra_steps, factor)."""
    for f in left_prefixes(rep):
        yield rep, [], f
    parts = comp_list(rep)
    cur = rep
    steps: list[RewriteStep] = []
    for _ in range(len(parts) - 2):
        nxt = apply_rule(cur, "", "assoc_left")
        steps.append(RewriteStep("", "assoc_left", cur, nxt))
        cur = nxt
        yield cur, list(steps), cur.left


def _witness_search(u: Term, v: Term, b: _Budget, use_braids: bool = True):
    """Interleave representatives of both terms, looking for a left factor of
    one equal to the other.

    Candidate factors are filtered by Laver values; the equality actually
    reported is always certified by rewriting."""
    gens = [(_reps(v), u, Verdict.LESS, v), (_reps(u), v, Verdict.GREATER, u)]
    live = [True, True]
    while any(live):
        for idx, (gen, small, verdict, large) in enumerate(gens):
            if not live[idx]:
                continue
            if b.used >= b.total:
                return None
            try:
                rep, parents = next(gen)
            except StopIteration:
                live[idx] = False
                continue
            b.used += 1
            key = laver.value(small)
            for rep2, extra, f in _factors(rep):
                if laver.value(f) != key:
                    continue
                if f is small:
                    eq_cert = None
                else:
                    sub = oracle_equal(small, f, max(1, b.left // 8), use_braids=False)
                    b.used += sub.cost
                    if sub.value is not Verdict.EQUAL:
                        continue
                    eq_cert = sub.certificate
                w = OrderWitness(large, rep2, _path_to(parents, rep) + extra, f, eq_cert)
                return verdict, w
    return None


def sigma_equal_certified(u: Term, v: Term, budget: int = DEFAULT_BUDGET) -> bool:
    """True when the oracle finds equality and the certificate replays."""
    r = oracle_equal(u, v, budget)
    return r.value is Verdict.EQUAL and r.certificate.verify()
