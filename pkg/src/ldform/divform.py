"""Division forms, their lexicographic order, and the product calculus.

A division form over a base element ``p`` (a p-DF) is either a *leaf*, an
element ``w <=_L p``, or a *node* ``p a_0 a_1 ... a_{n-1} * a_n`` whose
components are p-DFs and which is prenormal:

    a_k <= p a_0 ... a_{k-2}      for k >= 1  (p a_0 ... a_{-1} means p)
    a_n <  p a_0 ... a_{n-2}      strictly, when * is composition and n >= 1

Everything is stored as :class:`DF` objects.  An element of the algebra is
represented canonically by its x-DF (base = the generator).  A p-DF node
keeps the x-DF of ``p`` as its head and leaves are plain x-DFs, so a subterm
is a node of a p-DF exactly when its head *is* ``p``.

Products are computed in three tiers:

* tier 1: the explicit formulas that apply when ``u sharp v`` holds;
* tier 2: decomposition through the composition laws and left
  distributivity, guarded by a recursion watchdog;
* tier 3: a bounded enumeration of prenormal forms, used only when tier 2
  trips the watchdog (raises :class:`BudgetExhausted` when it finds nothing).
"""

from __future__ import annotations

import sys
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .rewrite import BudgetExhausted, sigma_neighbors
from .terms import APP, COMP, GEN, X, Term, chain, spine
from .verdict import Verdict

sys.setrecursionlimit(max(sys.getrecursionlimit(), 200000))

APP_STAR, COMP_STAR = "app", "comp"


class NonTermination(RuntimeError):
    """A recursion watchdog fired."""


class InvariantViolation(AssertionError):
    """A constructed form failed its structural invariants."""


class DF:
    """Interned division-form term: the generator, or ``Node(head, comps, star)``."""

    __slots__ = ("head", "comps", "star", "_hash", "size", "__weakref__")

    _table: dict[tuple, "DF"] = {}

    def __new__(cls, head: DF | None = None, comps: tuple = (), star: str = ""):
        key = (head, comps, star)
        d = cls._table.get(key)
        if d is not None:
            return d
        if head is not None and not comps:
            raise ValueError("a node needs at least one component")
        d = object.__new__(cls)
        d.head = head
        d.comps = comps
        d.star = star
        d._hash = hash(key)
        d.size = 1 if head is None else 1 + sum(c.size for c in comps)
        cls._table[key] = d
        return d

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return self is other

    def __reduce__(self):
        return (DF, (self.head, self.comps, self.star))

    @property
    def is_gen(self) -> bool:
        return self.head is None

    def __repr__(self) -> str:
        return f"DF({to_sexpr(self)})"


XDF = DF()


def node(p: DF, comps, star: str = APP_STAR) -> DF:
    return DF(p, tuple(comps), star)


def is_node(u: DF, p: DF) -> bool:
    """True when ``u`` is a node of a p-DF (as opposed to a leaf <=_L p)."""
    return u.head is p


def prefix(u: DF) -> DF:
    """``p a_0 ... a_{n-1}`` for ``u = p a_0 ... a_{n-1} * a_n``."""
    if len(u.comps) == 1:
        return u.head
    return DF(u.head, u.comps[:-1], APP_STAR)


def last(u: DF) -> DF:
    return u.comps[-1]


def with_star(u: DF, star: str) -> DF:
    return DF(u.head, u.comps, star)


# ---------------------------------------------------------------------------
# conversions


def to_term(u: DF) -> Term:
    """Flatten a DF (over any base) to the raw term it spells."""
    if u.head is None:
        return X
    head = to_term(u.head)
    return chain(head, [to_term(c) for c in u.comps], u.star)


def to_sexpr(u: DF) -> str:
    """``x`` for the generator, ``(df HEAD [c0 c1 ...] star)`` for nodes.

    The head is printed as the term it spells, so a leaf of a p-DF (an
    x-DF, head ``x``) is never confused with a node over ``p``.
    """
    if u.head is None:
        return "x"
    head = "x" if u.head is XDF else _term_text(u.head)
    inner = " ".join(to_sexpr(c) for c in u.comps)
    return f"(df {head} [{inner}] {u.star})"


def _term_text(u: DF) -> str:
    from .terms import to_infix
    t = to_infix(to_term(u))
    return t if t == "x" else f"({t.replace(' ', '')})"


def to_json(u: DF, p: DF | None = None) -> dict | str:
    from .terms import to_infix
    if p is not None and p is not XDF and not is_node(u, p):
        return {"leaf": to_infix(to_term(u))}
    if u.head is None:
        return "x"
    return {"p": to_infix(to_term(u.head)),
            "components": [to_json(c, p) for c in u.comps],
            "star": u.star}


# ---------------------------------------------------------------------------
# the engine


@dataclass
class TierStats:
    tier1: int = 0
    tier2: int = 0
    tier3: int = 0

    def snapshot(self) -> tuple[int, int, int]:
        return (self.tier1, self.tier2, self.tier3)


@dataclass
class Engine:
    """Memo tables, watchdog limits and tier counters.

    Results never depend on cache state; the tables only save work.
    """

    lex_bound: int = 64
    depth_limit: int = 4000
    tier3_budget: int = 20000
    use_tier2: bool = True
    audit: bool = False
    stats: TierStats = field(default_factory=TierStats)

    def __post_init__(self):
        self._lex: dict = {}
        self._mul: dict = {}
        self._comp: dict = {}
        self._sharp: dict = {}
        self._div: dict = {}
        self._iters: dict = {}
        self._elem: dict = {}
        self._depth = 0
        self._active: set = set()
        self._lock = threading.RLock()
        self._subterms: dict = {}
        # (parent call, child call) pairs where the descent check failed
        self.descent_violations: list = []
        self.descent_checks = 0

    # -- lexicographic order ------------------------------------------------

    def _entry(self, u: DF, i: int) -> DF | None:
        """i-th entry after ``p`` of the associated sequence of node ``u``."""
        n = len(u.comps)
        if i < n:
            return u.comps[i]
        if u.star != COMP_STAR:
            return None
        return self.iterate_df(u, i - n + 1)

    def iterate_df(self, u: DF, k: int) -> DF:
        """I_k(prefix(u), last(u)) as a DF, for a composition node ``u``."""
        its = self._iters.get(u)
        if its is None:
            y = prefix(u)
            its = [y, with_star(u, APP_STAR)]
            self._iters[u] = its
        base = u.comps
        while len(its) < k:
            # I_{m+2} = I_{m+1} I_m; I_{m+1} = y c I_1 ... I_{m-1}
            its.append(DF(u.head, base + tuple(its[:len(its) - 1]), APP_STAR))
        return its[k - 1]

    def lex(self, u: DF, v: DF, p: DF = XDF) -> int:
        if u is v:
            return 0
        key = (u, v, p)
        r = self._lex.get(key)
        if r is not None:
            return r
        un, vn = is_node(u, p), is_node(v, p)
        if not un and not vn:
            r = 0 if p is XDF else self.lex(u, v, XDF)
        elif not un:
            r = -1
        elif not vn:
            r = 1
        else:
            r = 0
            i = 0
            while True:
                a, b = self._entry(u, i), self._entry(v, i)
                if a is None or b is None:
                    r = (a is not None) - (b is not None)
                    break
                c = self.lex(a, b, p)
                if c:
                    r = c
                    break
                i += 1
                if i > self.lex_bound + max(len(u.comps), len(v.comps)):
                    raise NonTermination(
                        f"lexicographic comparison exceeded index bound {self.lex_bound}")
        self._lex[key] = r
        self._lex[(v, u, p)] = -r
        return r

    # -- prenormality -------------------------------------------------------

    def is_prenormal(self, p: DF, comps, star: str) -> bool:
        comps = tuple(comps)
        for k in range(1, len(comps)):
            bound = p if k == 1 else DF(p, comps[:k - 1], APP_STAR)
            c = self.lex(comps[k], bound, p)
            if c > 0:
                return False
            if c == 0 and star == COMP_STAR and k == len(comps) - 1:
                return False
        return True

    def check(self, u: DF, p: DF = XDF) -> None:
        """Raise InvariantViolation unless ``u`` is a valid p-DF."""
        if not is_node(u, p):
            if p is not XDF and self.lex(u, p, XDF) > 0:
                raise InvariantViolation(f"leaf above base: {to_sexpr(u)}")
            if p is not XDF and u.head is not None:
                self.check(u, XDF)
            return
        for c in u.comps:
            self.check(c, p)
        if not self.is_prenormal(p, u.comps, u.star):
            raise InvariantViolation(f"not prenormal: {to_sexpr(u)}")

    # -- extension test -----------------------------------------------------

    @staticmethod
    def extension(v: DF, y: DF, p: DF) -> tuple[DF, ...] | None:
        """Components of ``v`` beyond ``y`` when ``v``'s node extends ``y``."""
        if not is_node(v, p):
            return None
        if y is p:
            return v.comps
        if not is_node(y, p):
            return None
        k = len(y.comps)
        if len(v.comps) > k and v.comps[:k] == y.comps:
            return v.comps[k:]
        return None

    # -- sharp ----------------------------------------------------------------

    def sharp(self, p: DF, u: DF, v: DF) -> str | None:
        """Name of the clause under which ``u sharp v`` holds, else None."""
        key = (p, u, v)
        if key in self._sharp:
            return self._sharp[key]
        r = self._sharp_uncached(p, u, v)
        self._sharp[key] = r
        return r

    def _sharp_uncached(self, p: DF, u: DF, v: DF) -> str | None:
        if not is_node(u, p):
            if u is p:
                return "ii"
            # leaf strictly below p
            if is_node(v, p) or self.lex(u, v, XDF) <= 0:
                return None
            if self.lex(self.comp(XDF, u, v), p, XDF) <= 0:
                return "i"
            return None
        y = prefix(u)
        c = last(u)
        n = len(u.comps) - 1
        if u.star == COMP_STAR:
            # p o a sharp v iff a sharp v: the n = 0 instance of clause (v)
            if self.sharp(p, c, v) is None:
                return None
            if n == 0:
                return "iii"
            return "v" if self.lex(self.comp(p, c, v), prefix(y), p) <= 0 else None
        if self.lex(v, y, p) <= 0:
            return "iii" if n == 0 else "iv"
        ext = self.extension(v, y, p)
        if ext is None:
            return None
        b0 = ext[0]
        if self.sharp(p, c, b0) is None:
            return None
        if n == 0:
            return "iii"
        if self.lex(self.comp(p, c, b0), prefix(y), p) <= 0:
            return "iv"
        return None

    # -- helpers for building nodes ------------------------------------------

    def append_comp(self, y: DF, r: DF, p: DF) -> DF:
        """DF of ``y o r`` where ``y`` is ``p`` or an application node and
        ``r <= prefix(y)``."""
        while True:
            if y is p:
                return DF(p, (r,), COMP_STAR)
            z = prefix(y)
            c = self.lex(r, z, p)
            if c < 0:
                return DF(p, y.comps + (r,), COMP_STAR)
            if c > 0:
                raise InvariantViolation("composition append precondition failed")
            # (z a) o z = z o a
            y, r = z, last(y)

    # -- products -------------------------------------------------------------

    def mul(self, p: DF, u: DF, v: DF) -> DF:
        key = (p, u, v)
        r = self._mul.get(key)
        if r is None:
            r = self._product(p, u, v, False)
            self._mul[key] = r
        return r

    def comp(self, p: DF, u: DF, v: DF) -> DF:
        key = (p, u, v)
        r = self._comp.get(key)
        if r is None:
            r = self._product(p, u, v, True)
            self._comp[key] = r
        return r

    def _product(self, p: DF, u: DF, v: DF, is_comp: bool) -> DF:
        self._depth += 1
        try:
            if self._depth > self.depth_limit:
                raise NonTermination("product recursion exceeded depth limit")
            clause = self.sharp(p, u, v)
            if clause is not None:
                self.stats.tier1 += 1
                return self._tier1(p, u, v, is_comp, clause)
            key = (p, u, v, is_comp)
            if key in self._active:
                raise NonTermination("product recursion revisited its own call")
            if self.use_tier2:
                self._active.add(key)
                try:
                    self.stats.tier2 += 1
                    return self._tier2(p, u, v, is_comp)
                except NonTermination:
                    pass
                finally:
                    self._active.discard(key)
            self.stats.tier3 += 1
            op = COMP if is_comp else APP
            return self.tier3_search(Term(op, to_term(u), to_term(v)), p)
        finally:
            self._depth -= 1

    def _tier1(self, p: DF, u: DF, v: DF, is_comp: bool, clause: str) -> DF:
        if self.audit:
            def mul(p2, u2, v2):
                self._check_descent(p, u, v, p2, u2, v2)
                return self.mul(p2, u2, v2)

            def comp(p2, u2, v2):
                self._check_descent(p, u, v, p2, u2, v2)
                return self.comp(p2, u2, v2)
        else:
            mul, comp = self.mul, self.comp
        if clause == "i":
            return comp(XDF, u, v) if is_comp else mul(XDF, u, v)
        if clause == "ii":
            return DF(p, (v,), COMP_STAR if is_comp else APP_STAR)
        y, c = prefix(u), last(u)
        ycomps = u.comps[:-1]
        if u.star == COMP_STAR:
            # u = y o c: uv = y(cv), u o v = y o (c o v)
            if is_comp:
                return self.append_comp(y, comp(p, c, v), p)
            return DF(p, ycomps + (mul(p, c, v),), APP_STAR)
        if self.lex(v, y, p) <= 0:
            if is_comp:
                return self.append_comp(u, v, p)
            return DF(p, u.comps + (v,), APP_STAR)
        e = self.extension(v, y, p)
        m = len(e) - 1
        b0 = e[0]
        cb = comp(p, c, b0)
        if v.star == APP_STAR:
            if m == 0:
                if is_comp:
                    return DF(p, ycomps + (cb,), APP_STAR)
                return DF(p, ycomps + (mul(p, c, b0),), APP_STAR)
            comps = ycomps + (cb, e[1]) + tuple(mul(p, u, ek) for ek in e[2:])
            if is_comp:
                return DF(p, comps + (u,), COMP_STAR)
            return DF(p, comps, APP_STAR)
        # v ends with composition
        if m == 0:
            if is_comp:
                return self.append_comp(y, cb, p)
            inner = DF(p, ycomps + (mul(p, c, b0),), APP_STAR)
            return DF(p, ycomps + (cb, y, inner), COMP_STAR)
        if m == 1:
            if is_comp:
                return DF(p, ycomps + (cb, e[1]), COMP_STAR)
            inner = DF(p, ycomps + (mul(p, c, b0),), APP_STAR)
            return DF(p, ycomps + (cb, e[1], inner), COMP_STAR)
        mids = tuple(mul(p, u, ek) for ek in e[2:-1])
        tail = comp(p, u, e[-1]) if is_comp else mul(p, u, e[-1])
        return DF(p, ycomps + (cb, e[1]) + mids + (tail,), COMP_STAR)

    def _tier2(self, p: DF, u: DF, v: DF, is_comp: bool) -> DF:
        mul, comp = self.mul, self.comp
        if not is_node(u, p):
            # a leaf strictly below p: work with elements, then divide
            z = self._op(XDF, u, self.element(v, p), is_comp)
            return self.divide_element(p, z)
        y, c = prefix(u), last(u)
        if u.star == COMP_STAR:
            # (y o c) v = y (c v); (y o c) o v = y o (c o v)
            inner = self._op(p, c, v, is_comp)
            return self._op(p, y, inner, is_comp)
        # u = y c and v > y: write v = y b_0 b_1 ... * b_m
        e = self.extension(v, y, p)
        vstar = v.star
        if e is None:
            e, vstar = self._quotients(p, y, v)
        b0, m = e[0], len(e) - 1
        if is_comp:
            if m == 0 and vstar == APP_STAR:
                # (y c) o (y b) = y (c o b)
                return mul(p, y, comp(p, c, b0))
            if m == 0:
                # (y c) o (y o b) = y o (c o b)
                return comp(p, y, comp(p, c, b0))
            if vstar == COMP_STAR:
                s = mul(p, y, comp(p, c, b0))
                if m == 1:
                    # u o (y b_0 o b_1) = y (c o b_0) o b_1
                    return comp(p, s, e[1])
                s = mul(p, s, e[1])
                for ek in e[2:-1]:
                    s = mul(p, s, mul(p, u, ek))
                return comp(p, s, comp(p, u, e[-1]))
            # u o v = u v o u
            return comp(p, mul(p, u, v), u)
        if vstar == APP_STAR:
            if m == 0:
                # (y c)(y b) = y (c b)
                return mul(p, y, mul(p, c, b0))
            # (y c)(y b_0 b_1 ... b_m) = y (c o b_0) b_1 (u b_2) ... (u b_m)
            s = mul(p, y, comp(p, c, b0))
            s = mul(p, s, e[1])
            for ek in e[2:]:
                s = mul(p, s, mul(p, u, ek))
            return s
        inner = mul(p, y, mul(p, c, b0))
        if m == 0:
            # (y c)(y o b) = y (c o b) y o y (c b)
            return comp(p, mul(p, mul(p, y, comp(p, c, b0)), y), inner)
        if m == 1:
            # (y c)(y b_0 o b_1) = y (c o b_0) b_1 o y (c b_0)
            return comp(p, mul(p, mul(p, y, comp(p, c, b0)), e[1]), inner)
        s = mul(p, y, comp(p, c, b0))
        s = mul(p, s, e[1])
        for ek in e[2:-1]:
            s = mul(p, s, mul(p, u, ek))
        return comp(p, s, mul(p, u, e[-1]))

    def _quotients(self, p: DF, y: DF, v: DF) -> tuple[tuple[DF, ...], str]:
        """Components of ``v`` divided by ``y`` (as p-DFs) and the final operation."""
        ey, ev = self.element(y, p), self.element(v, p)
        d = self.divide_element(ey, ev)
        if not is_node(d, ey):
            raise InvariantViolation("quotient requested for an element not above the divisor")
        comps = tuple(self.divide_element(p, self.element(a, ey)) for a in d.comps)
        return comps, d.star

    def _op(self, p: DF, u: DF, v: DF, is_comp: bool) -> DF:
        return self.comp(p, u, v) if is_comp else self.mul(p, u, v)

    # -- elements ---------------------------------------------------------------

    def element(self, u: DF, p: DF) -> DF:
        """The x-DF of the element a p-DF denotes."""
        if p is XDF or not is_node(u, p):
            return u
        r = self._elem.get((u, p))
        if r is None:
            acc = p
            for i, a in enumerate(u.comps):
                ea = self.element(a, p)
                if i == len(u.comps) - 1 and u.star == COMP_STAR:
                    acc = self.comp(XDF, acc, ea)
                else:
                    acc = self.mul(XDF, acc, ea)
            r = acc
            self._elem[(u, p)] = r
        return r

    def of_term(self, t: Term) -> DF:
        """x-DF of a raw term by structural recursion."""
        if t.kind == GEN:
            return XDF
        a, b = self.of_term(t.left), self.of_term(t.right)
        return self.comp(XDF, a, b) if t.kind == COMP else self.mul(XDF, a, b)

    # -- division ----------------------------------------------------------------

    def divide_element(self, p: DF, z: DF) -> DF:
        """The p-DF of the element whose x-DF is ``z``."""
        if p is XDF:
            return z
        key = (p, z)
        r = self._div.get(key)
        if r is not None:
            return r
        if key in self._active:
            raise NonTermination("division recursion revisited its own call")
        self._active.add(key)
        try:
            r = self._divide(p, z)
        except NonTermination:
            self.stats.tier3 += 1
            r = self.tier3_search(to_term(z), p)
        finally:
            self._active.discard(key)
        self._div[key] = r
        return r

    def _divide(self, p: DF, z: DF) -> DF:
        if self.lex(z, p, XDF) <= 0:
            return z
        q, g = prefix(p), last(p)
        zq = self.divide_element(q, z)
        # zq = q h c_1 ... * c_m over base q
        h = zq.comps[0]
        rest = zq.comps[1:]
        eh = self.element(h, q)
        if not rest and zq.star == COMP_STAR:
            # z = q o h = (q h) o q
            first = self._div_qh(p, q, g, eh)
            return self.comp(p, first, self.divide_element(p, q))
        s = self._div_qh(p, q, g, eh)
        for i, ci in enumerate(rest):
            di = self.divide_element(p, self.element(ci, q))
            if i == len(rest) - 1 and zq.star == COMP_STAR:
                s = self.comp(p, s, di)
            else:
                s = self.mul(p, s, di)
        return s

    def _div_qh(self, p: DF, q: DF, g: DF, h: DF) -> DF:
        """p-DF of ``q h`` where ``p = q g`` or ``p = q o g`` (elements as x-DFs)."""
        qh = self.mul(XDF, q, h)
        if self.lex(qh, p, XDF) <= 0:
            return qh
        hg = self.divide_element(g, h)
        if not is_node(hg, g):
            # h <= g, so q h <= q g; only reachable for p = q o g
            return qh
        bs = [self.element(b, g) for b in hg.comps]
        r = len(bs) - 1
        if p.star == APP_STAR:
            # q (g b_0 ... * b_r) = (q g)(q b_0) ... * (q b_r)
            factors = [self.mul(XDF, q, b) for b in bs]
            star = hg.star
        else:
            if r == 0 and hg.star == COMP_STAR:
                # q (g o b) = q (g b o g) = (q o g) b o (q g)
                factors = [bs[0], self.mul(XDF, q, g)]
                star = COMP_STAR
            else:
                # q (g b_0 b_1 ... * b_r) = (q o g) b_0 (q b_1) ... * (q b_r)
                factors = [bs[0]] + [self.mul(XDF, q, b) for b in bs[1:]]
                star = hg.star
        s = DF(p, (self.divide_element(p, factors[0]),),
               COMP_STAR if (len(factors) == 1 and star == COMP_STAR) else APP_STAR)
        for i, f in enumerate(factors[1:], start=1):
            d = self.divide_element(p, f)
            if i == len(factors) - 1 and star == COMP_STAR:
                s = self.comp(p, s, d)
            else:
                s = self.mul(p, s, d)
        return s

    # -- hybrid forms ---------------------------------------------------------

    def hybrid(self, p: DF, q: DF, u: DF) -> DF:
        """The <p,q>-form of a p-DF ``u``: each node's first component is
        replaced by its q-DF and the later components are treated the same
        way recursively.  Leaves (elements <= p) are kept."""
        if not is_node(u, p):
            return u
        a0 = self.divide_element(q, self.element(u.comps[0], p))
        rest = tuple(self.hybrid(p, q, a) for a in u.comps[1:])
        return DF(p, (a0,) + rest, u.star)

    # -- tier 3 -----------------------------------------------------------------

    def read_df(self, t: Term, p: DF = XDF) -> DF | None:
        """The valid p-DF spelled literally by ``t``, or None."""
        if p is XDF:
            return self._read_x(t)
        pt = to_term(p)
        args: list[Term] = []
        cur = t
        star = APP_STAR
        if cur.kind == COMP and cur is not pt:
            star = COMP_STAR
            args.append(cur.right)
            cur = cur.left
        while cur is not pt and cur.kind == APP:
            args.append(cur.right)
            cur = cur.left
        if cur is pt and args:
            comps = []
            for a in reversed(args):
                d = self.read_df(a, p)
                if d is None:
                    return None
                comps.append(d)
            if self.is_prenormal(p, comps, star):
                return DF(p, tuple(comps), star)
            return None
        d = self._read_x(t)
        if d is not None and self.lex(d, p, XDF) <= 0:
            return d
        return None

    def _read_x(self, t: Term) -> DF | None:
        if t.kind == GEN:
            return XDF
        sp = spine(t)
        if sp.head.kind != GEN:
            return None
        comps = []
        for a in sp.args:
            d = self._read_x(a)
            if d is None:
                return None
            comps.append(d)
        if not self.is_prenormal(XDF, comps, sp.star):
            return None
        return DF(XDF, tuple(comps), sp.star)

    def tier3_search(self, start: Term, p: DF = XDF) -> DF:
        """Breadth-first search through single law applications from ``start``
        for a term that spells a valid p-DF.  Division forms are unique, so
        the first hit is the answer."""
        cap = 3 * start.leaves + 4
        seen = {start}
        queue = deque([start])
        expanded = 0
        while queue:
            t = queue.popleft()
            d = self.read_df(t, p)
            if d is not None:
                return d
            if expanded >= self.tier3_budget:
                break
            expanded += 1
            for step in sigma_neighbors(t):
                s = step.after
                if s not in seen and s.leaves <= cap:
                    seen.add(s)
                    queue.append(s)
        raise BudgetExhausted(
            f"no division form found within {self.tier3_budget} rewriting steps")

    # -- sharp witnesses --------------------------------------------------------

    def sharp_witness(self, p: DF, u: DF, v: DF) -> SharpWitness | None:
        clause = self.sharp(p, u, v)
        if clause is None:
            return None
        subs: tuple = ()
        if clause == "v" or (clause == "iii" and u.star == COMP_STAR):
            subs = (self.sharp_witness(p, last(u), v),)
        elif clause in ("iii", "iv") and u.star == APP_STAR and self.lex(v, prefix(u), p) > 0:
            b0 = self.extension(v, prefix(u), p)[0]
            subs = (self.sharp_witness(p, last(u), b0),)
        return SharpWitness(clause, p, u, v, subs)

    # -- descent audit ------------------------------------------------------------

    def subterm_set(self, u: DF, p: DF) -> frozenset:
        """``u`` and all its subterms as a p-DF (prefixes and last components)."""
        key = (u, p)
        r = self._subterms.get(key)
        if r is None:
            r = frozenset({u})
            if is_node(u, p):
                r = r | self.subterm_set(prefix(u), p) | self.subterm_set(last(u), p)
            self._subterms[key] = r
        return r

    def _check_descent(self, p: DF, u: DF, v: DF, p2: DF, u2: DF, v2: DF) -> None:
        if p2 is not p:
            # a product of leaves, computed one level down
            return
        self.descent_checks += 1
        if u2 is not u and u2 in self.subterm_set(u, p):
            return
        if u2 is u and v2 is not v and v2 in self.subterm_set(v, p):
            return
        self.descent_violations.append(((u, v), (u2, v2)))

    # -- powers -------------------------------------------------------------------

    def find_power(self, p: DF, q: DF) -> int:
        """Least ``n`` with ``p^(n) >_L q``."""
        n, cur = 0, p
        while self.lex(cur, q) <= 0:
            cur = self.mul(XDF, p, cur)
            n += 1
        return n


@dataclass(frozen=True)
class SharpWitness:
    """Which clause made ``u sharp v`` hold, with witnesses for the recursive
    conditions it relied on."""

    clause: str
    p: DF
    u: DF
    v: DF
    subs: tuple = ()

    def replay(self, eng: Engine) -> bool:
        """Re-check the clause conditions from scratch."""
        p, u, v = self.p, self.u, self.v
        if self.clause == "ii":
            return u is p
        if self.clause == "i":
            return (not is_node(u, p) and u is not p and not is_node(v, p)
                    and eng.lex(v, u) < 0 and eng.lex(eng.comp(XDF, u, v), p) <= 0)
        if not is_node(u, p):
            return False
        y, c, n = prefix(u), last(u), len(u.comps) - 1
        if self.clause == "v":
            if u.star != COMP_STAR or n == 0 or len(self.subs) != 1:
                return False
            s = self.subs[0]
            return (s.u is c and s.v is v and s.replay(eng)
                    and eng.lex(eng.comp(p, c, v), prefix(y), p) <= 0)
        if self.clause not in ("iii", "iv") or (n == 0) != (self.clause == "iii"):
            return False
        if u.star == COMP_STAR:
            return (n == 0 and len(self.subs) == 1 and self.subs[0].u is c
                    and self.subs[0].v is v and self.subs[0].replay(eng))
        if eng.lex(v, y, p) <= 0:
            return True
        e = eng.extension(v, y, p)
        if e is None or len(self.subs) != 1:
            return False
        s = self.subs[0]
        if not (s.u is c and s.v is e[0] and s.replay(eng)):
            return False
        return n == 0 or eng.lex(eng.comp(p, c, e[0]), prefix(y), p) <= 0

    def to_json(self) -> dict:
        return {"clause": self.clause, "subs": [s.to_json() for s in self.subs]}


# ---------------------------------------------------------------------------
# module-level operations on a shared engine

DEFAULT_ENGINE = Engine()


def _with_engine(fn):
    def wrapped(*args, engine: Engine | None = None, **kw):
        eng = engine or DEFAULT_ENGINE
        with eng._lock:
            return fn(eng, *args, **kw)
    wrapped.__name__ = fn.__name__
    wrapped.__qualname__ = fn.__qualname__
    wrapped.__doc__ = fn.__doc__
    return wrapped


@_with_engine
def df_of_term(eng: Engine, t: Term) -> DF:
    """The x-DF of a term."""
    return eng.of_term(t)


@_with_engine
def compare_terms(eng: Engine, s: Term, t: Term) -> Verdict:
    return Verdict.from_sign(eng.lex(eng.of_term(s), eng.of_term(t)))


@_with_engine
def lex_compare(eng: Engine, u: DF, v: DF, p: Term | None = None) -> Verdict:
    base = XDF if p is None else eng.of_term(p)
    return Verdict.from_sign(eng.lex(u, v, base))


@_with_engine
def is_prenormal(eng: Engine, p: Term, comps, star: str = APP_STAR) -> bool:
    return eng.is_prenormal(eng.of_term(p), tuple(comps), star)


@_with_engine
def is_valid(eng: Engine, u: DF, p: Term | None = None) -> bool:
    try:
        eng.check(u, XDF if p is None else eng.of_term(p))
        return True
    except InvariantViolation:
        return False


@_with_engine
def sharp(eng: Engine, p: Term, u: DF, v: DF) -> SharpWitness | None:
    return eng.sharp_witness(eng.of_term(p), u, v)


@_with_engine
def mul_df(eng: Engine, p: Term, u: DF, v: DF) -> DF:
    return eng.mul(eng.of_term(p), u, v)


@_with_engine
def comp_df(eng: Engine, p: Term, u: DF, v: DF) -> DF:
    return eng.comp(eng.of_term(p), u, v)


@_with_engine
def hybrid_df(eng: Engine, p: Term, q: Term, u: DF) -> DF:
    return eng.hybrid(eng.of_term(p), eng.of_term(q), u)


@_with_engine
def divide(eng: Engine, p: Term, w: Term) -> DF:
    """|w|^p, the p-DF of ``w``."""
    return eng.divide_element(eng.of_term(p), eng.of_term(w))


@_with_engine
def element(eng: Engine, u: DF, p: Term | None = None) -> DF:
    """The x-DF of the element a p-DF denotes."""
    return eng.element(u, XDF if p is None else eng.of_term(p))


@_with_engine
def find_power(eng: Engine, p: Term, q: Term) -> int:
    return eng.find_power(eng.of_term(p), eng.of_term(q))


def assoc_seq(u: DF, p: DF = XDF, engine: Engine | None = None) -> Iterator[DF]:
    """The associated sequence of ``u``: ``<u>`` for a leaf; ``p, a_0, ..., a_n``
    for a node, continued by the iterates ``I_m(prefix, a_n)`` (forever) when
    the node ends with composition."""
    eng = engine or DEFAULT_ENGINE
    if not is_node(u, p):
        yield u
        return
    yield p
    i = 0
    while True:
        e = eng._entry(u, i)
        if e is None:
            return
        yield e
        i += 1
