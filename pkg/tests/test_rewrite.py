from __future__ import annotations

from hypothesis import given

from ldform.rewrite import (INVERSE_RULE, SIGMA_RULES, apply_rule, common_reduct,
                            common_reduct_search, ld_successors, sigma_neighbors, trace_json)
from ldform.terms import X, at, enumerate_upto, is_A, parse

from conftest import terms_strategy

P = parse


def test_ld_successors_examples():
    assert ld_successors(X) == []
    (step,) = ld_successors(P("x (x x)"))
    assert step.position == "" and step.after is P("(x x) (x x)")
    steps = ld_successors(P("(x (x x)) (x x)"))
    assert sorted(s.position for s in steps) == ["", "L"]


def test_sigma_neighbors_examples():
    assert sigma_neighbors(X) == []
    assert P("x x o x") in {s.after for s in sigma_neighbors(P("x o x"))}
    assert P("x (x x)") in {s.after for s in sigma_neighbors(P("(x o x) x"))}


def test_ten_directed_rules_with_inverses():
    assert len(SIGMA_RULES) == 10
    assert all(INVERSE_RULE[INVERSE_RULE[r]] == r for r in SIGMA_RULES)


def test_every_step_is_undone_by_its_inverse():
    for t in enumerate_upto(4):
        for s in sigma_neighbors(t):
            back = apply_rule(s.after, s.position, INVERSE_RULE[s.rule])
            if back is not None and s.rule not in ("comp_swap", "undist_comp"):
                assert back is t
            # the inverse rule always applies to what the rule produced
            assert SIGMA_RULES[INVERSE_RULE[s.rule]](at(s.after, s.position)) is not None


def test_expansion_grows_leaf_count():
    for t in enumerate_upto(6, a_only=True):
        for s in ld_successors(t):
            assert s.after.leaves > t.leaves


def test_common_reduct_examples():
    assert common_reduct(P("x (x x)"), P("(x x) (x x)"), 1) is P("(x x) (x x)")
    assert common_reduct(X, X, 0) is X
    r = common_reduct_search(P("x (x (x x))"), P("(x x) ((x x) (x x))"), 500)
    assert r is not None
    assert all(set(d) == {"position", "rule", "term"} for d in trace_json(r.left_trace))


def test_budget_exhaustion_returns_none():
    assert common_reduct(X, P("x x"), 50) is None


@given(terms_strategy(6, with_comp=False))
def test_one_step_reducts_rejoin(t):
    reducts = [s.after for s in ld_successors(t)]
    for a in reducts[:3]:
        for b in reducts[:3]:
            assert common_reduct(a, b, 20000) is not None
    assert is_A(t)
