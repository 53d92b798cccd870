from __future__ import annotations

import itertools

import pytest

from ldform.oracle import (BraidCertificate, EqualityCertificate, OrderWitness, flatten,
                           comp_list, oracle_compare, oracle_equal, replay)
from ldform.terms import X, enumerate_upto, is_A, parse, power_app
from ldform.verdict import Verdict

P = parse


def _equal(u, v, budget=20000, **kw):
    r = oracle_equal(u, v, budget, **kw)
    return r.value is Verdict.EQUAL and r.certificate.verify()


def test_equal_examples():
    assert _equal(P("x (x x)"), P("(x x) (x x)"))
    assert _equal(P("x o x"), P("x x o x"))


def test_unequal_terms_are_unknown_never_equal():
    for budget in (0, 10, 1000):
        assert oracle_equal(X, P("x x"), budget).value is Verdict.UNKNOWN


def test_equality_certificates_replay_to_the_other_side():
    r = oracle_equal(P("x (x o x)"), P("x x o x x"))
    cert = r.certificate
    assert isinstance(cert, EqualityCertificate) and not cert.braid_pairs
    assert replay(cert.start, cert.steps) is cert.end


def test_compare_examples_with_witnesses():
    for small, large in [("x", "x x"), ("x x", "x o x"), ("x x x", "x (x x)")]:
        r = oracle_compare(P(small), P(large), 4000)
        assert r.value is Verdict.LESS
        assert isinstance(r.certificate, OrderWitness)
        assert r.certificate.verify(P(small))
        assert oracle_compare(P(large), P(small), 4000).value is Verdict.GREATER


def test_verdicts_are_monotone_in_budget():
    pairs = [(P("x x x"), P("x (x x)")), (P("(x x) x"), P("x ((x x) x)")),
             (P("x (x x)"), P("(x x) (x x)"))]
    for u, v in pairs:
        seen = {oracle_compare(u, v, b).value for b in (0, 5, 50, 500, 5000)}
        seen.discard(Verdict.UNKNOWN)
        assert len(seen) <= 1


def test_braid_fallback_can_be_disabled():
    u, v = P("x (x (x x))"), P("(x x x) (x x)")
    r = oracle_compare(u, v, 3, use_braids=False)
    assert r.value in (Verdict.UNKNOWN, Verdict.LESS, Verdict.GREATER)
    r2 = oracle_compare(u, v, 3)
    assert r2.value is not Verdict.UNKNOWN
    if isinstance(r2.certificate, BraidCertificate):
        assert r2.certificate.word


def test_flatten_gives_composition_lists_of_plain_terms():
    for t in enumerate_upto(4):
        f, steps = flatten(t)
        assert replay(t, steps) is f
        assert all(is_A(c) for c in comp_list(f))


def test_law_instances_over_small_arguments():
    terms = enumerate_upto(2)
    for a, b, c in itertools.product(terms, repeat=3):
        assert _equal(a @ (b @ c), (a @ b) @ c)
        assert _equal((a @ b) * c, a * (b * c))
        assert _equal(a * (b @ c), (a * b) @ (a * c))
        assert _equal(a @ b, (a * b) @ a)


@pytest.mark.parametrize("p", ["x", "x x"])
def test_power_identity(p):
    p = P(p)
    for n in range(5):
        for i in range(n + 1):
            assert _equal(power_app(p, n + 1), power_app(p, i) * power_app(p, n))
