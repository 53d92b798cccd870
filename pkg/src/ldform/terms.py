"""Raw terms over one generator with application and composition.

Terms are hash-consed: two structurally equal terms are the same Python
object, so ``is`` comparison and ``id``-free hashing are both cheap and
memo tables keyed on terms never compare deep trees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

GEN, APP, COMP = 0, 1, 2

_KIND_NAMES = {GEN: "gen", APP: "app", COMP: "comp"}


class Term:
    """An immutable, interned binary tree.

    ``kind`` is one of GEN, APP, COMP.  ``left``/``right`` are None for the
    generator.  ``leaves``, ``depth`` and ``size`` (node count) are computed
    once at construction.
    """

    __slots__ = ("kind", "left", "right", "leaves", "depth", "size", "_hash", "__weakref__")

    _table: dict[tuple, "Term"] = {}

    def __new__(cls, kind: int, left: Term | None = None, right: Term | None = None):
        key = (kind, left, right)
        t = cls._table.get(key)
        if t is not None:
            return t
        t = object.__new__(cls)
        t.kind = kind
        t.left = left
        t.right = right
        if kind == GEN:
            t.leaves, t.depth, t.size = 1, 0, 1
        else:
            t.leaves = left.leaves + right.leaves
            t.depth = 1 + max(left.depth, right.depth)
            t.size = 1 + left.size + right.size
        t._hash = hash(key)
        cls._table[key] = t
        return t

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return self is other

    def __reduce__(self):
        return (Term, (self.kind, self.left, self.right))

    def __repr__(self) -> str:
        return f"Term({to_infix(self)!r})"

    def __str__(self) -> str:
        return to_infix(self)

    # -- convenience operators: ``a * b`` is application, ``a @ b`` composition
    def __mul__(self, other: Term) -> Term:
        return Term(APP, self, other)

    def __matmul__(self, other: Term) -> Term:
        return Term(COMP, self, other)

    @property
    def is_gen(self) -> bool:
        return self.kind == GEN

    @property
    def is_app(self) -> bool:
        return self.kind == APP

    @property
    def is_comp(self) -> bool:
        return self.kind == COMP


X = Term(GEN)


def app(a: Term, b: Term) -> Term:
    return Term(APP, a, b)


def comp(a: Term, b: Term) -> Term:
    return Term(COMP, a, b)


@lru_cache(maxsize=None)
def is_A(t: Term) -> bool:
    """True when ``t`` contains no composition node."""
    if t.kind == GEN:
        return True
    if t.kind == COMP:
        return False
    return is_A(t.left) and is_A(t.right)


# ---------------------------------------------------------------------------
# spines


@dataclass(frozen=True)
class Spine:
    head: Term
    args: tuple[Term, ...]
    star: str  # "app" or "comp"

    def reassemble(self) -> Term:
        return chain(self.head, self.args, self.star)


def spine(t: Term) -> Spine:
    """Split ``t`` as ``head a_0 ... a_{k-1} * a_k``.

    The App chain is peeled maximally; a Comp root whose left side is such a
    chain is recorded with ``star == "comp"``.
    """
    star = "app"
    tail: list[Term] = []
    cur = t
    if cur.kind == COMP:
        star = "comp"
        tail.append(cur.right)
        cur = cur.left
    while cur.kind == APP:
        tail.append(cur.right)
        cur = cur.left
    tail.reverse()
    return Spine(cur, tuple(tail), star)


def chain(head: Term, args, star: str = "app") -> Term:
    """Left-associated product ``head a_0 a_1 ... a_{n-1} * a_n``."""
    args = list(args)
    if not args:
        return head
    t = head
    for a in args[:-1]:
        t = Term(APP, t, a)
    return Term(COMP if star == "comp" else APP, t, args[-1])


def left_prefixes(t: Term) -> Iterator[Term]:
    """Proper left factors of ``t``: every ``p`` with ``t = p a_0 ... * a_n``."""
    cur = t
    if cur.kind == COMP:
        cur = cur.left
        yield cur
    while cur.kind == APP:
        cur = cur.left
        yield cur


# ---------------------------------------------------------------------------
# iterates and powers


def iterate(a: Term, b: Term, n: int) -> Term:
    """I_1 = a, I_2 = ab, I_{n+2} = I_{n+1} I_n."""
    if n < 1:
        raise ValueError("iterate index must be >= 1")
    prev, cur = a, Term(APP, a, b)
    if n == 1:
        return a
    for _ in range(n - 2):
        prev, cur = cur, Term(APP, cur, prev)
    return cur


def power_comp(p: Term, n: int) -> Term:
    """p^1 = p, p^{n+1} = p o p^n."""
    if n < 1:
        raise ValueError("composition power must be >= 1")
    t = p
    for _ in range(n - 1):
        t = Term(COMP, p, t)
    return t


def power_app(p: Term, n: int) -> Term:
    """p^(0) = p, p^(n+1) = p p^(n)."""
    if n < 0:
        raise ValueError("application power must be >= 0")
    t = p
    for _ in range(n):
        t = Term(APP, p, t)
    return t


# ---------------------------------------------------------------------------
# positions


def subterms(t: Term) -> list[tuple[str, Term]]:
    """Preorder list of ``(position, subterm)``; positions are strings over
    ``L``/``R`` with ``""`` for the root."""
    out: list[tuple[str, Term]] = []
    stack = [("", t)]
    while stack:
        pos, s = stack.pop()
        out.append((pos, s))
        if s.kind != GEN:
            stack.append((pos + "R", s.right))
            stack.append((pos + "L", s.left))
    return out


def at(t: Term, pos: str) -> Term:
    for c in pos:
        t = t.left if c == "L" else t.right
    return t


def replace_at(t: Term, pos: str, new: Term) -> Term:
    if not pos:
        return new
    if pos[0] == "L":
        return Term(t.kind, replace_at(t.left, pos[1:], new), t.right)
    return Term(t.kind, t.left, replace_at(t.right, pos[1:], new))


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def _enum(n: int, a_only: bool) -> tuple[Term, ...]:
    if n == 1:
        return (X,)
    out = []
    kinds = (APP,) if a_only else (APP, COMP)
    for k in range(1, n):
        for lt in _enum(k, a_only):
            for rt in _enum(n - k, a_only):
                for kind in kinds:
                    out.append(Term(kind, lt, rt))
    return tuple(out)


def enumerate_terms(leaves: int, a_only: bool = False) -> tuple[Term, ...]:
    """All terms with exactly ``leaves`` leaves, in a fixed order."""
    if leaves < 1:
        raise ValueError("leaf count must be >= 1")
    return _enum(leaves, a_only)


def enumerate_upto(max_leaves: int, a_only: bool = False) -> list[Term]:
    return list(itertools.chain.from_iterable(
        enumerate_terms(n, a_only) for n in range(1, max_leaves + 1)))


# ---------------------------------------------------------------------------
# parsing and printing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            toks.append((c, i))
            i += 1
        elif c.isalnum() or c in "*∘·_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "*∘·_"):
                j += 1
            word = text[i:j]
            # "xx" and "xox" are accepted as runs of single-letter tokens
            for k, ch in enumerate(word):
                toks.append((ch, i + k))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.end = len(text)

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'!r}, got {tok!r}", self.pos())
        self.i += 1
        return tok


class _InfixParser(_Parser):
    def parse(self) -> Term:
        t = self.comp_expr()
        if self.peek() is not None:
            raise ParseError(f"trailing token {self.peek()!r}", self.pos())
        return t

    def comp_expr(self) -> Term:
        t = self.app_expr()
        while self.peek() in ("o", "∘"):
            self.take()
            t = Term(COMP, t, self.app_expr())
        return t

    def app_expr(self) -> Term:
        t = self.atom()
        while self.peek() in ("x", "("):
            t = Term(APP, t, self.atom())
        return t

    def atom(self) -> Term:
        tok = self.peek()
        if tok == "x":
            self.take()
            return X
        if tok == "(":
            self.take()
            t = self.comp_expr()
            self.take(")")
            return t
        raise ParseError(f"expected 'x' or '(', got {tok!r}", self.pos())


class _SexprParser(_Parser):
    def parse(self) -> Term:
        t = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing token {self.peek()!r}", self.pos())
        return t

    def expr(self) -> Term:
        tok = self.peek()
        if tok == "x":
            self.take()
            return X
        self.take("(")
        op = self.take()
        if op in ("*", "·"):
            kind = APP
        elif op in ("o", "∘"):
            kind = COMP
        else:
            raise ParseError(f"unknown operator {op!r}", self.toks[self.i - 1][1])
        a = self.expr()
        b = self.expr()
        self.take(")")
        return Term(kind, a, b)


def parse(text: str, format: str = "auto") -> Term:
    """Parse infix (``x (x x) o x``) or s-expression (``(o (* x x) x)``) text.

    With ``format="auto"`` a leading ``(*`` or ``(o`` selects s-expressions.
    """
    if format == "auto":
        s = text.strip()
        format = "sexpr" if (s.startswith("(*") or s.startswith("(o ")
                             or s.startswith("(·") or s.startswith("(∘")) else "infix"
    if format == "sexpr":
        return _SexprParser(text).parse()
    if format == "infix":
        return _InfixParser(text).parse()
    raise ValueError(f"unknown format {format!r}")


@lru_cache(maxsize=None)
def to_infix(t: Term) -> str:
    if t.kind == GEN:
        return "x"
    if t.kind == COMP:
        r = to_infix(t.right)
        if t.right.kind == COMP:
            r = f"({r})"
        return f"{to_infix(t.left)} o {r}"
    left = to_infix(t.left)
    if t.left.kind == COMP:
        left = f"({left})"
    r = to_infix(t.right)
    if t.right.kind != GEN:
        r = f"({r})"
    return f"{left} {r}"


@lru_cache(maxsize=None)
def to_sexpr(t: Term) -> str:
    if t.kind == GEN:
        return "x"
    op = "*" if t.kind == APP else "o"
    return f"({op} {to_sexpr(t.left)} {to_sexpr(t.right)})"


def to_text(t: Term, format: str = "infix") -> str:
    if format == "infix":
        return to_infix(t)
    if format == "sexpr":
        return to_sexpr(t)
    raise ValueError(f"unknown format {format!r}")


def read_corpus(path) -> list[Term]:
    """One term per line; blank lines and lines starting with ``#`` skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s and not s.startswith("#"):
                out.append(parse(s))
    return out


def kind_name(t: Term) -> str:
    return _KIND_NAMES[t.kind]
