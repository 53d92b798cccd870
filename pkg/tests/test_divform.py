from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings

from ldform import divform as dfm
from ldform.divform import (APP_STAR, COMP_STAR, DF, XDF, BudgetExhausted, Engine,
                            InvariantViolation, assoc_seq, compare_terms, comp_df, df_of_term,
                            divide, element, find_power, hybrid_df, is_prenormal, is_valid,
                            lex_compare, mul_df, sharp, to_sexpr, to_term)
from ldform.terms import X, enumerate_upto, iterate, parse, power_app
from ldform.verdict import Verdict

from conftest import terms_strategy

P = parse
XX = DF(XDF, (XDF,), APP_STAR)          # the node x x
XXX = DF(XDF, (XDF, XDF), APP_STAR)     # (x x) x
XCX = DF(XDF, (XDF,), COMP_STAR)        # x o x


# -- prenormality -------------------------------------------------------------

def test_prenormal_examples():
    assert is_prenormal(X, [XX, XDF, XDF], APP_STAR)
    assert is_prenormal(X, [XDF], COMP_STAR)


def test_prenormality_counts_the_head():
    # a_2 = xx against p a_0 = xx: allowed; strictly larger is not
    assert is_prenormal(X, [XDF, XDF, XX], APP_STAR)
    assert not is_prenormal(X, [XDF, XDF, XXX], APP_STAR)
    # a_1 <= p: x x (x x) is not a node form
    assert not is_prenormal(X, [XDF, XX], APP_STAR)
    # a final composition must be strictly below its bound
    assert not is_prenormal(X, [XDF, XDF], COMP_STAR)


# -- lexicographic order ------------------------------------------------------

def test_lex_examples():
    assert lex_compare(XDF, XX) is Verdict.LESS
    assert lex_compare(XXX, XCX) is Verdict.LESS
    xxx_right = df_of_term(P("x (x x)"))
    assert lex_compare(XXX, xxx_right) is Verdict.LESS
    assert lex_compare(XCX, XCX) is Verdict.EQUAL


def test_associated_sequences():
    assert list(assoc_seq(XDF)) == [XDF]
    assert list(assoc_seq(XXX)) == [XDF, XDF, XDF]
    head = list(itertools.islice(assoc_seq(XCX), 6))
    assert head[:3] == [XDF, XDF, XDF]
    assert head[3] is XX and head[4] is XXX
    # the iterates after a_n increase towards the composition node
    its = list(itertools.islice(assoc_seq(XCX), 2, 9))
    for a, b in zip(its, its[1:]):
        assert lex_compare(a, b) is Verdict.LESS and lex_compare(b, XCX) is Verdict.LESS


def test_subterms_are_below_their_term():
    eng = Engine()
    for t in enumerate_upto(5):
        u = eng.of_term(t)
        for s in eng.subterm_set(u, XDF):
            if s is not u:
                assert eng.lex(s, u) < 0


# -- sharp ----------------------------------------------------------------------

def test_sharp_examples():
    w = sharp(X, XDF, XX)
    assert w.clause == "ii"
    w = sharp(X, XX, XDF)
    assert w.clause == "iii" and w.replay(dfm.DEFAULT_ENGINE)


def test_no_leaf_is_below_the_generator():
    for t in enumerate_upto(3):
        w = sharp(X, XDF, df_of_term(t))
        assert w is not None and w.clause == "ii"


def test_composition_node_sharp_follows_its_last_component():
    eng = Engine()
    u = eng.of_term(P("x o (x x) x"))
    v = eng.of_term(P("x o x"))
    assert eng.sharp(XDF, u.comps[-1], v) is None
    assert eng.sharp(XDF, u, v) is None


def test_sharp_witnesses_replay_and_lemma5_closure():
    eng = Engine()
    forms = sorted({eng.of_term(t) for t in enumerate_upto(4)}, key=lambda d: d.size)
    for u, v in itertools.product(forms, repeat=2):
        w = eng.sharp_witness(XDF, u, v)
        if w is None:
            continue
        assert w.replay(eng)
        for z in forms:
            if eng.lex(z, v) <= 0:
                assert eng.sharp(XDF, u, z) is not None


# -- products -------------------------------------------------------------------

def test_product_examples():
    assert mul_df(X, XDF, XX) is DF(XDF, (XX,), APP_STAR)
    assert mul_df(X, XX, XDF) is XXX
    assert comp_df(X, XDF, XDF) is XCX


def test_lemma6_conclusion_and_descent():
    eng = Engine(audit=True)
    forms = sorted({eng.of_term(t) for t in enumerate_upto(4)}, key=lambda d: d.size)
    for u, v in itertools.product(forms, repeat=2):
        if eng.sharp(XDF, u, v):
            r = eng.mul(XDF, u, v)
            eng.comp(XDF, u, v)
            assert eng.sharp(XDF, r, u) is not None
    assert eng.descent_checks > 0 and not eng.descent_violations


# -- canonical forms ------------------------------------------------------------

def test_df_of_term_examples():
    assert df_of_term(P("x (x x)")) is DF(XDF, (XX,), APP_STAR)
    assert df_of_term(P("(x x) (x x)")) is df_of_term(P("x (x x)"))
    assert df_of_term(P("x o x")) is XCX
    assert to_sexpr(df_of_term(P("x (x x)"))) == "(df x [(df x [x] app)] app)"


def test_compare_examples():
    assert compare_terms(X, P("x x")) is Verdict.LESS
    assert compare_terms(P("x (x x)"), P("(x x) (x x)")) is Verdict.EQUAL
    assert compare_terms(P("(x x) x"), P("x (x x)")) is Verdict.LESS
    assert compare_terms(P("(x x) x"), P("x o x")) is Verdict.LESS
    assert compare_terms(P("x x"), P("x o x")) is Verdict.LESS


def test_to_term_examples():
    assert to_term(XXX) is P("(x x) x")
    assert to_term(XCX) is P("x o x")
    assert to_term(XDF) is X


def test_forms_spell_their_own_element():
    eng = Engine()
    for t in enumerate_upto(5):
        u = eng.of_term(t)
        eng.check(u)
        assert eng.of_term(to_term(u)) is u


# -- division ---------------------------------------------------------------------

def test_divide_examples():
    xx = df_of_term(P("x x"))
    assert divide(P("x x"), P("(x x) x")) is DF(xx, (XDF,), APP_STAR)
    assert divide(P("x x"), P("x o x")) is DF(xx, (XDF,), COMP_STAR)
    assert divide(P("x (x x)"), X) is XDF
    assert to_sexpr(divide(P("x x"), P("(x x) x"))) == "(df (xx) [x] app)"


def test_division_round_trip_and_validity():
    eng = Engine()
    terms = enumerate_upto(3)
    for p, w in itertools.product(terms, enumerate_upto(4)):
        ep = eng.of_term(p)
        d = eng.divide_element(ep, eng.of_term(w))
        eng.check(d, ep)
        assert eng.element(d, ep) is eng.of_term(w)
        assert eng.of_term(to_term(d)) is eng.of_term(w)


def test_hybrid_forms():
    assert hybrid_df(X, X, XDF) is XDF
    u = df_of_term(P("x (x x)"))
    assert hybrid_df(X, X, u) is u
    xx = df_of_term(P("x x"))
    u = DF(xx, (divide(P("x x"), P("(x x) x")),), APP_STAR)
    h = hybrid_df(P("x x"), X, u)
    assert h.comps[0] is df_of_term(P("(x x) x"))
    assert element(h.comps[0]) is element(u.comps[0], P("x x"))


def test_find_power_examples():
    assert find_power(X, X) == 1
    assert find_power(X, P("x x")) == 2
    # p^(0) = p is already above x
    assert find_power(P("x x"), X) == 0
    assert find_power(X, iterate(X, X, 5)) >= 2


# -- fallback and watchdog --------------------------------------------------------

def test_tier3_agrees_with_tier2():
    normal = Engine()
    forced = Engine(use_tier2=False, tier3_budget=20000)
    u, v = normal.of_term(P("(x x) x")), normal.of_term(P("x o x"))
    assert forced.comp(XDF, u, v) is normal.comp(XDF, u, v)
    assert forced.stats.tier3 >= 1
    assert forced.read_df(to_term(XCX)) is XCX
    assert forced.read_df(P("x (x x) x")) is DF(XDF, (XX, XDF), APP_STAR)
    # x x (x x) breaks prenormality: its second component exceeds x
    assert forced.read_df(P("(x x) (x x)")) is None


def test_tier3_budget_exhaustion():
    forced = Engine(use_tier2=False, tier3_budget=5)
    u, v = forced.of_term(P("(x x) x")), forced.of_term(P("x o x x"))
    with pytest.raises(BudgetExhausted):
        forced.mul(XDF, u, v)


def test_lex_watchdog():
    # (x x) o x is not prenormal and spells the same element as x o x, so the
    # two associated sequences never separate
    eng = Engine(lex_bound=8)
    with pytest.raises(dfm.NonTermination):
        eng.lex(XCX, DF(XDF, (XDF, XDF), COMP_STAR))


def test_check_rejects_broken_forms():
    eng = Engine()
    with pytest.raises(InvariantViolation):
        eng.check(DF(XDF, (XDF, XX), APP_STAR))
    assert not is_valid(DF(XDF, (XDF, XDF), COMP_STAR))


# -- properties on random terms ----------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(terms_strategy(6), terms_strategy(6))
def test_order_is_antisymmetric_and_cancellative(a, b):
    c = compare_terms(a, b)
    assert compare_terms(b, a) is c.flip()
    assert compare_terms(X * a, X * b) is c
    assert (c is Verdict.EQUAL) == (df_of_term(a) is df_of_term(b))


@settings(max_examples=150, deadline=None)
@given(terms_strategy(5), terms_strategy(5))
def test_products_sandwich(p, r):
    # p r < p o r, and x <= everything
    assert compare_terms(p * r, p @ r) is Verdict.LESS
    assert compare_terms(X, p) is not Verdict.GREATER
    assert compare_terms(p, p * r) is Verdict.LESS


@settings(max_examples=100, deadline=None)
@given(terms_strategy(4), terms_strategy(5))
def test_random_division(p, w):
    eng = dfm.DEFAULT_ENGINE
    ep = eng.of_term(p)
    d = eng.divide_element(ep, eng.of_term(w))
    eng.check(d, ep)
    assert eng.element(d, ep) is eng.of_term(w)


def test_power_is_above():
    for p in enumerate_upto(2):
        for q in enumerate_upto(3):
            n = find_power(p, q)
            assert compare_terms(power_app(p, n), q) is Verdict.GREATER
