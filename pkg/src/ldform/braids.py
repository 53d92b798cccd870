"""Braid-group model of the free left-distributive algebra.

The braid group on infinitely many strands with

    a * b = a . sh(b) . s1 . sh(a)^-1

is left distributive, and the sub-system generated by the trivial braid is
free.  Left divisibility in that sub-system matches the braid order: ``a``
is a proper left divisor of ``b`` exactly when ``a^-1 b`` is s-positive.
Handle reduction decides both equality and the sign of a braid word, so this
gives a second, rewriting-free comparator for composition-free terms.

Braid words are tuples of nonzero ints: ``i`` is s_i, ``-i`` its inverse.
"""

from __future__ import annotations

from functools import lru_cache

from .terms import APP, GEN, Term, is_A


def shift(word: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(g + 1 if g > 0 else g - 1 for g in word)


def inverse(word: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-g for g in reversed(word))


@lru_cache(maxsize=None)
def braid_of(t: Term) -> tuple[int, ...]:
    """Braid word of a composition-free term, generator sent to the identity."""
    if t.kind == GEN:
        return ()
    if t.kind != APP:
        raise ValueError("braid model covers composition-free terms only")
    a = braid_of(t.left)
    b = braid_of(t.right)
    return free_reduce(a + shift(b) + (1,) + shift(inverse(a)))


def free_reduce(word) -> tuple[int, ...]:
    out: list[int] = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def handle_reduce(word) -> tuple[int, ...]:
    """Handle reduction; always reduces the handle whose right end
    comes first, which is permitted, so the loop terminates."""
    w = list(free_reduce(word))
    while True:
        found = None
        for r in range(len(w)):
            i = abs(w[r])
            for l in range(r - 1, -1, -1):
                j = abs(w[l])
                if j == i:
                    if w[l] == -w[r]:
                        found = (l, r)
                    break
                if j == i - 1:
                    break
            if found:
                break
        if found is None:
            return tuple(w)
        l, r = found
        i = abs(w[l])
        e = 1 if w[l] > 0 else -1
        middle: list[int] = []
        for d in w[l + 1:r]:
            if abs(d) == i + 1:
                middle.extend((-e * (i + 1), i if d > 0 else -i, e * (i + 1)))
            else:
                middle.append(d)
        w = w[:l] + list(free_reduce(middle)) + w[r + 1:]
        w = list(free_reduce(w))


def sign(word) -> int:
    """+1 if s-positive, -1 if s-negative, 0 if trivial."""
    w = handle_reduce(word)
    if not w:
        return 0
    m = min(abs(g) for g in w)
    signs = {g > 0 for g in w if abs(g) == m}
    assert len(signs) == 1, "handle-free word must be s-positive or s-negative"
    return 1 if signs.pop() else -1


def braid_compare(u: Term, v: Term) -> int:
    """-1, 0, +1 as ``u`` is left-below, equal to, or left-above ``v``.

    ``u`` is left-below ``v`` exactly when ``u^-1 v`` is s-positive."""
    if not (is_A(u) and is_A(v)):
        raise ValueError("braid model covers composition-free terms only")
    if u is v:
        return 0
    return -sign(inverse(braid_of(u)) + braid_of(v))
