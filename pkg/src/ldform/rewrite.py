"""One-step rewriting: left-distributive expansion and the composition laws.

``ld_successors`` is the expansion relation a(bc) -> (ab)(ac) on terms
without composition.  ``sigma_neighbors`` applies any of the laws

    a o (b o c) = (a o b) o c
    (a o b) c   = a (b c)
    a (b o c)   = a b o a c
    a o b       = a b o a
    a (b c)     = (a b)(a c)

in either direction at any position.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable

from .terms import APP, COMP, GEN, Term, replace_at, subterms, to_infix


class BudgetExhausted(RuntimeError):
    """A bounded search ran out of budget without reaching a conclusion."""


@dataclass(frozen=True)
class RewriteStep:
    position: str
    rule: str
    before: Term
    after: Term

    def to_json(self) -> dict:
        return {"position": self.position, "rule": self.rule, "term": to_infix(self.after)}


# Each rule maps a subterm to its rewrite or None.

def _ld_expand(t: Term):
    if t.kind == APP and t.right.kind == APP:
        a, b, c = t.left, t.right.left, t.right.right
        return Term(APP, Term(APP, a, b), Term(APP, a, c))
    return None


def _ld_collapse(t: Term):
    if t.kind == APP and t.left.kind == APP and t.right.kind == APP and t.left.left is t.right.left:
        return Term(APP, t.left.left, Term(APP, t.left.right, t.right.right))
    return None


def _assoc_left(t: Term):
    if t.kind == COMP and t.right.kind == COMP:
        return Term(COMP, Term(COMP, t.left, t.right.left), t.right.right)
    return None


def _assoc_right(t: Term):
    if t.kind == COMP and t.left.kind == COMP:
        return Term(COMP, t.left.left, Term(COMP, t.left.right, t.right))
    return None


def _comp_apply(t: Term):
    # (a o b) c -> a (b c)
    if t.kind == APP and t.left.kind == COMP:
        return Term(APP, t.left.left, Term(APP, t.left.right, t.right))
    return None


def _apply_comp(t: Term):
    # a (b c) -> (a o b) c
    if t.kind == APP and t.right.kind == APP:
        return Term(APP, Term(COMP, t.left, t.right.left), t.right.right)
    return None


def _dist_comp(t: Term):
    # a (b o c) -> a b o a c
    if t.kind == APP and t.right.kind == COMP:
        a = t.left
        return Term(COMP, Term(APP, a, t.right.left), Term(APP, a, t.right.right))
    return None


def _undist_comp(t: Term):
    # a b o a c -> a (b o c)
    if (t.kind == COMP and t.left.kind == APP and t.right.kind == APP
            and t.left.left is t.right.left):
        return Term(APP, t.left.left, Term(COMP, t.left.right, t.right.right))
    return None


def _comp_swap(t: Term):
    # a o b -> a b o a
    if t.kind == COMP:
        a, b = t.left, t.right
        return Term(COMP, Term(APP, a, b), a)
    return None


def _comp_unswap(t: Term):
    # a b o a -> a o b
    if t.kind == COMP and t.left.kind == APP and t.left.left is t.right:
        return Term(COMP, t.right, t.left.right)
    return None


SIGMA_RULES: dict[str, Callable[[Term], Term | None]] = {
    "assoc_left": _assoc_left,
    "assoc_right": _assoc_right,
    "comp_apply": _comp_apply,
    "apply_comp": _apply_comp,
    "dist_comp": _dist_comp,
    "undist_comp": _undist_comp,
    "comp_swap": _comp_swap,
    "comp_unswap": _comp_unswap,
    "ld_expand": _ld_expand,
    "ld_collapse": _ld_collapse,
}

INVERSE_RULE = {
    "assoc_left": "assoc_right", "assoc_right": "assoc_left",
    "comp_apply": "apply_comp", "apply_comp": "comp_apply",
    "dist_comp": "undist_comp", "undist_comp": "dist_comp",
    "comp_swap": "comp_unswap", "comp_unswap": "comp_swap",
    "ld_expand": "ld_collapse", "ld_collapse": "ld_expand",
}


def ld_successors(t: Term) -> list[RewriteStep]:
    """All single expansions a(bc) -> (ab)(ac) of ``t``."""
    out = []
    for pos, s in subterms(t):
        r = _ld_expand(s)
        if r is not None:
            out.append(RewriteStep(pos, "ld_expand", t, replace_at(t, pos, r)))
    return out


def sigma_neighbors(t: Term, rules: Iterable[str] | None = None) -> list[RewriteStep]:
    """All single applications of any law, either direction, any position."""
    names = list(SIGMA_RULES) if rules is None else list(rules)
    out = []
    for pos, s in subterms(t):
        if s.kind == GEN:
            continue
        for name in names:
            r = SIGMA_RULES[name](s)
            if r is not None:
                out.append(RewriteStep(pos, name, t, replace_at(t, pos, r)))
    return out


def apply_rule(t: Term, pos: str, rule: str) -> Term | None:
    from .terms import at
    r = SIGMA_RULES[rule](at(t, pos))
    return None if r is None else replace_at(t, pos, r)


# ---------------------------------------------------------------------------
# common reducts


@dataclass
class ReductResult:
    meet: Term
    left_trace: list[RewriteStep]
    right_trace: list[RewriteStep]
    cost: int


def _trace(parents: dict, t: Term) -> list[RewriteStep]:
    steps = []
    while parents[t] is not None:
        step = parents[t]
        steps.append(step)
        t = step.before
    steps.reverse()
    return steps


def common_reduct_search(u: Term, v: Term, budget: int,
                         successors=ld_successors) -> ReductResult | None:
    """Lockstep breadth-first search for a term reachable from both sides.

    ``budget`` counts expanded nodes over both sides.  Returns None when the
    budget runs out; that says nothing about whether ``u`` and ``v`` are equal.
    """
    if u is v:
        return ReductResult(u, [], [], 0)
    parents = [{u: None}, {v: None}]
    frontiers = [deque([u]), deque([v])]
    cost = 0
    side = 0
    while frontiers[0] or frontiers[1]:
        if not frontiers[side]:
            side = 1 - side
        # expand one whole layer of this side
        layer = frontiers[side]
        frontiers[side] = deque()
        mine, other = parents[side], parents[1 - side]
        for t in layer:
            if cost >= budget:
                return None
            cost += 1
            for step in successors(t):
                s = step.after
                if s in mine:
                    continue
                mine[s] = step
                if s in other:
                    lt, rt = _trace(parents[0], s), _trace(parents[1], s)
                    return ReductResult(s, lt, rt, cost)
                frontiers[side].append(s)
        side = 1 - side
    return None


def common_reduct(u: Term, v: Term, budget: int) -> Term | None:
    """A common ->-descendant of ``u`` and ``v`` found within ``budget`` expanded
    nodes, or None."""
    res = common_reduct_search(u, v, budget)
    return None if res is None else res.meet


def trace_json(steps: list[RewriteStep]) -> list[dict]:
    return [s.to_json() for s in steps]
