"""p-normal forms: terms over the letters ``{q : q <_L p}`` and the powers
``p^(i)``.

A p-NF term is a leaf ``q <_L p``, a bare power ``p^(i)``, or a node
``p^(i) a_0 a_1 ... * a_n`` with p-NF components that is prenormal and has
``a_0 <_L p^(i)``.  The head is forced: ``p^(i) <= w < p^(i+1)``.

The conversion follows the existence proof.  Take the p-DF
``p a_0 a_1 ... * a_n`` of ``w``.  If ``a_0 <_L p`` the head is ``p^(0)``.
Otherwise ``a_0`` has a p-NF with head ``p^(m)`` (with ``p^(0)`` when
``a_0 = p``), and absorbing the leading ``p`` gives ``p (p^(m) ...) =
p^(m+1) ...``, so the head is ``p^(m+1)``.  The components below the head
are then read off by dividing ``w`` by that power.
"""

from __future__ import annotations

from dataclasses import dataclass

from .divform import (APP_STAR, COMP_STAR, DEFAULT_ENGINE, DF, Engine, InvariantViolation,
                      XDF, is_node, to_sexpr, to_term)
from .terms import Term, chain, power_app, to_infix


@dataclass(frozen=True)
class NFLeaf:
    """An element strictly below ``p``, stored as its x-DF."""

    value: DF


@dataclass(frozen=True)
class NFNode:
    """``p^(power) a_0 ... * a_n``; no components means the bare power."""

    power: int
    comps: tuple = ()
    star: str = APP_STAR

    @property
    def is_bare(self) -> bool:
        return not self.comps


NFTerm = NFLeaf | NFNode


class NormalForms:
    """p-NF conversion on top of a division-form engine."""

    def __init__(self, engine: Engine | None = None):
        self.eng = engine or DEFAULT_ENGINE
        self._memo: dict = {}
        self._powers: dict = {}

    def power(self, p: DF, i: int) -> DF:
        """x-DF of ``p^(i)``."""
        ps = self._powers.setdefault(p, [p])
        while len(ps) <= i:
            ps.append(self.eng.mul(XDF, p, ps[-1]))
        return ps[i]

    def of_element(self, p: DF, z: DF) -> NFTerm:
        """|z|_p for an element given by its x-DF."""
        key = (p, z)
        r = self._memo.get(key)
        if r is None:
            r = self._convert(p, z)
            self._memo[key] = r
        return r

    def _convert(self, p: DF, z: DF) -> NFTerm:
        eng = self.eng
        c = eng.lex(z, p)
        if c < 0:
            return NFLeaf(z)
        if c == 0:
            return NFNode(0)
        d = eng.divide_element(p, z)
        a0 = eng.element(d.comps[0], p)
        if eng.lex(a0, p) < 0:
            i, hd = 0, d
        else:
            # p a_0 with a_0 = p^(m) b_0 ... absorbs into p^(m+1) (p b_0) ...
            head_a0 = self.of_element(p, a0)
            i = head_a0.power + 1
            h = self.power(p, i)
            hd = eng.divide_element(h, z)
        h = self.power(p, i)
        if not is_node(hd, h):
            if hd is not h:
                raise InvariantViolation("power head does not divide the element")
            return NFNode(i)
        comps = tuple(self.of_element(p, eng.element(a, h)) for a in hd.comps)
        return NFNode(i, comps, hd.star)

    # -- reading back ---------------------------------------------------------

    def value(self, p: DF, u: NFTerm) -> DF:
        """x-DF of the element an NF term denotes."""
        if isinstance(u, NFLeaf):
            return u.value
        acc = self.power(p, u.power)
        for k, a in enumerate(u.comps):
            ea = self.value(p, a)
            if k == len(u.comps) - 1 and u.star == COMP_STAR:
                acc = self.eng.comp(XDF, acc, ea)
            else:
                acc = self.eng.mul(XDF, acc, ea)
        return acc

    def check(self, p: DF, u: NFTerm) -> None:
        """Raise InvariantViolation unless ``u`` is a valid p-NF term."""
        eng = self.eng
        if isinstance(u, NFLeaf):
            if eng.lex(u.value, p) >= 0:
                raise InvariantViolation("NF leaf not below the base")
            return
        if u.is_bare:
            return
        for a in u.comps:
            self.check(p, a)
        h = self.power(p, u.power)
        elems = [self.value(p, a) for a in u.comps]
        if eng.lex(elems[0], h) >= 0:
            raise InvariantViolation("first NF component not below its power head")
        # prenormality: a_k <= h a_0 ... a_{k-2}, strict at a final composition
        bound = h
        for k in range(1, len(elems)):
            if k >= 2:
                bound = eng.mul(XDF, bound, elems[k - 2])
            c = eng.lex(elems[k], bound)
            if c > 0 or (c == 0 and u.star == COMP_STAR and k == len(elems) - 1):
                raise InvariantViolation("NF node not prenormal")

    # -- order ------------------------------------------------------------------

    def _seq(self, p: DF, u: NFTerm):
        """Associated sequence: the head letter, the components, then (for a
        final composition) the NF of the iterates of ``(prefix, a_n)``."""
        if isinstance(u, NFLeaf):
            yield ("leaf", u.value)
            return
        yield ("power", u.power)
        for a in u.comps:
            yield a
        if u.star != COMP_STAR or not u.comps:
            return
        eng = self.eng
        pre = NFNode(u.power, u.comps[:-1]) if len(u.comps) > 1 else NFNode(u.power)
        prev, cur = self.value(p, pre), self.value(p, NFNode(u.power, u.comps, APP_STAR))
        yield self.of_element(p, prev)
        while True:
            yield self.of_element(p, cur)
            prev, cur = cur, eng.mul(XDF, cur, prev)

    def _letter_cmp(self, a, b) -> int:
        if a[0] != b[0]:
            return -1 if a[0] == "leaf" else 1
        if a[0] == "leaf":
            return self.eng.lex(a[1], b[1])
        return (a[1] > b[1]) - (a[1] < b[1])

    def lex(self, p: DF, u: NFTerm, v: NFTerm, bound: int = 64) -> int:
        """Lexicographic comparison of associated sequences of NF terms."""
        if u == v:
            return 0
        su, sv = self._seq(p, u), self._seq(p, v)
        first = True
        for _ in range(bound):
            a, b = next(su, None), next(sv, None)
            if a is None or b is None:
                return (a is not None) - (b is not None)
            c = self._letter_cmp(a, b) if first else self.lex(p, a, b, bound)
            first = False
            if c:
                return c
        raise RuntimeError("NF comparison exceeded its index bound")


def to_term_nf(p: Term, u: NFTerm) -> Term:
    """Spell an NF term with ``p^(i)`` expanded as an application tower."""
    if isinstance(u, NFLeaf):
        return to_term(u.value)
    return chain(power_app(p, u.power), [to_term_nf(p, a) for a in u.comps], u.star)


def nf_to_sexpr(u: NFTerm) -> str:
    """``(leaf ...)``, ``p^(i)`` for a bare power, ``(nf p^(i) [..] star)``."""
    if isinstance(u, NFLeaf):
        return f"(leaf {to_sexpr(u.value)})"
    if u.is_bare:
        return f"p^({u.power})"
    inner = " ".join(nf_to_sexpr(a) for a in u.comps)
    return f"(nf p^({u.power}) [{inner}] {u.star})"


def nf_to_json(u: NFTerm) -> dict:
    if isinstance(u, NFLeaf):
        return {"leaf": to_infix(to_term(u.value))}
    return {"power": u.power, "components": [nf_to_json(a) for a in u.comps],
            "star": u.star if u.comps else None}


_DEFAULT = NormalForms()


def nf_of(p: Term, w: Term, forms: NormalForms | None = None) -> NFTerm:
    """|w|_p."""
    nf = forms or _DEFAULT
    with nf.eng._lock:
        return nf.of_element(nf.eng.of_term(p), nf.eng.of_term(w))
