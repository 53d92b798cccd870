"""The two finite/exact models used by the oracle: Laver tables and braids."""

from __future__ import annotations

import itertools

import pytest

from ldform import laver
from ldform.braids import braid_compare, braid_of, free_reduce, handle_reduce, sign
from ldform.terms import X, enumerate_upto, parse

P = parse


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_laver_tables_satisfy_every_law(n):
    size = 1 << n
    r = range(1, size + 1)
    s = lambda a, b: laver.star(n, a, b)  # noqa: E731
    c = lambda a, b: laver.circ(n, a, b)  # noqa: E731
    for a, b, d in itertools.product(r, r, r):
        assert s(a, s(b, d)) == s(s(a, b), s(a, d))
        assert c(a, c(b, d)) == c(c(a, b), d)
        assert s(c(a, b), d) == s(a, s(b, d))
        assert s(a, c(b, d)) == c(s(a, b), s(a, d))
    for a, b in itertools.product(r, r):
        assert c(a, b) == c(s(a, b), a)


def test_laver_values_respect_law_instances():
    for a, b, c in itertools.product(enumerate_upto(2), repeat=3):
        lhs, rhs = a * (b @ c), (a * b) @ (a * c)
        assert laver.value(lhs) == laver.value(rhs)
        assert laver.value(a @ b) == laver.value((a * b) @ a)


def test_braid_model_is_left_distributive():
    terms = enumerate_upto(3, a_only=True)
    for a, b, c in itertools.product(terms, repeat=3):
        assert braid_compare(a * (b * c), (a * b) * (a * c)) == 0


def test_braid_order_examples():
    assert braid_compare(X, P("x x")) == -1
    assert braid_compare(P("x x x"), P("x (x x)")) == -1
    assert braid_compare(P("x (x x)"), P("(x x) (x x)")) == 0


def test_handle_reduction_outputs_reduced_words():
    assert free_reduce((1, -1, 2)) == (2,)
    assert handle_reduce((1, 2, -1)) == (-2, 1, 2)
    assert sign(()) == 0 and sign((1,)) == 1 and sign((-2, -1)) == -1


def test_composition_rejected_by_braids():
    with pytest.raises(ValueError):
        braid_of(P("x o x"))
