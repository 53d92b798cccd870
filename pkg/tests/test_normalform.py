from __future__ import annotations

import itertools
import random

import pytest

from ldform.divform import APP_STAR, COMP_STAR, DF, XDF, Engine, InvariantViolation, df_of_term
from ldform.normalform import (NFLeaf, NFNode, NormalForms, nf_of, nf_to_json, nf_to_sexpr,
                               to_term_nf)
from ldform.terms import X, enumerate_upto, parse

P = parse


def test_examples():
    assert nf_of(X, P("x x")) == NFNode(1)
    assert nf_of(X, X) == NFNode(0)
    u = nf_of(X, P("(x x) x"))
    assert u == NFNode(1, (NFNode(0),), APP_STAR)
    assert nf_to_sexpr(u) == "(nf p^(1) [p^(0)] app)"
    assert nf_to_json(NFNode(1)) == {"power": 1, "components": [], "star": None}


def test_leaves_are_below_the_base():
    u = nf_of(P("x x"), X)
    assert isinstance(u, NFLeaf) and u.value is XDF
    assert nf_to_sexpr(u) == "(leaf x)"


def test_composition_head():
    u = nf_of(X, P("x o x"))
    # x x <_L x o x < x (x x), so the head is p^(1)
    assert u == NFNode(1, (NFNode(0),), COMP_STAR)


def test_round_trip_and_validity():
    nf = NormalForms(Engine())
    eng = nf.eng
    for p, w in itertools.product(enumerate_upto(3), enumerate_upto(4)):
        ep, ew = eng.of_term(p), eng.of_term(w)
        u = nf.of_element(ep, ew)
        nf.check(ep, u)
        assert nf.value(ep, u) is ew
        assert eng.of_term(to_term_nf(p, u)) is ew


def test_head_power_brackets_the_element():
    nf = NormalForms(Engine())
    eng = nf.eng
    for p, w in itertools.product(enumerate_upto(2), enumerate_upto(4)):
        ep, ew = eng.of_term(p), eng.of_term(w)
        u = nf.of_element(ep, ew)
        if isinstance(u, NFNode):
            assert eng.lex(nf.power(ep, u.power), ew) <= 0
            assert eng.lex(ew, nf.power(ep, u.power + 1)) < 0


def test_lex_order_matches_element_order():
    nf = NormalForms(Engine())
    eng = nf.eng
    rng = random.Random(7)
    terms = enumerate_upto(4)
    for _ in range(400):
        p, a, b = rng.choice(terms[:5]), rng.choice(terms), rng.choice(terms)
        ep, ea, eb = eng.of_term(p), eng.of_term(a), eng.of_term(b)
        c = nf.lex(ep, nf.of_element(ep, ea), nf.of_element(ep, eb))
        assert c == eng.lex(ea, eb)


def test_check_rejects_bad_terms():
    nf = NormalForms(Engine())
    with pytest.raises(InvariantViolation):
        nf.check(XDF, NFLeaf(XDF))
    with pytest.raises(InvariantViolation):
        # the first component must be below the head p^(0)
        nf.check(XDF, NFNode(0, (NFNode(1),), APP_STAR))
    nf.check(XDF, NFNode(2))
    assert nf.value(XDF, NFNode(1)) is df_of_term(P("x x"))
    assert nf.value(XDF, NFNode(0, (NFNode(0),), COMP_STAR)) is DF(XDF, (XDF,), COMP_STAR)
