"""Laver tables as a finite model of the laws.

A_n has elements 1..2^n with ``a * 1 = a + 1`` and
``a * (b + 1) = (a * b) * (a + 1)``.  Setting ``a o b = a * (b + 1) - 1``
(everything mod 2^n, represented in 1..2^n) satisfies all of the laws, so
``x -> 1`` extends to a homomorphism from terms with composition.  Equal
elements therefore get equal table values; different values prove two
terms distinct.  The oracle uses these values as a cheap filter.
"""

from __future__ import annotations

from functools import lru_cache

from .terms import APP, GEN, Term


@lru_cache(maxsize=None)
def table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row ``a`` of the result is ``a * b`` for ``b`` in 1..2^n (index 0 unused)."""
    size = 1 << n
    rows = [[0] * (size + 1) for _ in range(size + 1)]
    for a in range(size, 0, -1):
        if a == size:
            rows[a] = list(range(0, size + 1))
            continue
        rows[a][1] = a + 1
        for b in range(1, size):
            rows[a][b + 1] = rows[rows[a][b]][a + 1]
    return tuple(tuple(r) for r in rows)


def star(n: int, a: int, b: int) -> int:
    return table(n)[a][b]


def circ(n: int, a: int, b: int) -> int:
    size = 1 << n
    return (table(n)[a][b % size + 1] - 2) % size + 1


def value(t: Term, n: int = 10) -> int:
    """The value of ``t`` in A_n with the generator sent to 1."""
    return _value(t, n)


@lru_cache(maxsize=None)
def _value(t: Term, n: int) -> int:
    if t.kind == GEN:
        return 1
    a, b = _value(t.left, n), _value(t.right, n)
    return star(n, a, b) if t.kind == APP else circ(n, a, b)
