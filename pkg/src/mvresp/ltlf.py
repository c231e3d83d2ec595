"""LTLf formulas over finite histories: syntax tree, parser, printer, evaluator.

Formulas are kept in a small core (atom, top, not, and, next, until). The
derived operators are smart constructors that build core trees, so
``eventually(p)`` and ``parse_formula("F p")`` are structurally equal.
Double negations are collapsed on construction.

Concrete grammar, loosest binding first::

    impl   := or ('->' impl)?           right-associative
    or     := and ('|' and)*
    and    := until ('&' until)*
    until  := unary ('U' until)?        right-associative
    unary  := ('!' | 'X' | 'F' | 'G') unary | primary
    primary:= ATOM | 'true' | 'false' | '(' impl ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from .system import History

__all__ = [
    "Formula",
    "FormulaSyntaxError",
    "TOP",
    "BOTTOM",
    "atom",
    "neg",
    "conj",
    "disj",
    "implies",
    "next_",
    "until",
    "eventually",
    "henceforth",
    "parse_formula",
    "to_text",
    "eval_at",
    "holds",
    "truth_vector",
    "atoms",
    "depth",
]

CORE_ARITY = {"atom": 0, "top": 0, "not": 1, "and": 2, "next": 1, "until": 2}


@dataclass(frozen=True)
class Formula:
    kind: str
    args: tuple[Formula, ...] = ()
    name: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in CORE_ARITY:
            raise ValueError(f"unknown formula kind {self.kind!r}")
        if len(self.args) != CORE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {CORE_ARITY[self.kind]} operands, got {len(self.args)}")
        if (self.kind == "atom") != (self.name is not None):
            raise ValueError("only atoms carry a proposition name")

    def __str__(self) -> str:
        return to_text(self)


TOP = Formula("top")


def atom(name: str) -> Formula:
    return Formula("atom", name=name)


def neg(f: Formula) -> Formula:
    if f.kind == "not":
        return f.args[0]
    return Formula("not", (f,))


BOTTOM = neg(TOP)


def conj(a: Formula, b: Formula) -> Formula:
    return Formula("and", (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return neg(conj(neg(a), neg(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return neg(conj(a, neg(b)))


def next_(f: Formula) -> Formula:
    return Formula("next", (f,))


def until(a: Formula, b: Formula) -> Formula:
    return Formula("until", (a, b))


def henceforth(f: Formula) -> Formula:
    """G f, i.e. not (true U not f)."""
    return neg(until(TOP, neg(f)))


def eventually(f: Formula) -> Formula:
    """F f, i.e. not G not f; collapses to true U f."""
    return neg(henceforth(neg(f)))


def atoms(f: Formula) -> set[str]:
    if f.kind == "atom":
        return {f.name}  # type: ignore[arg-type]
    out: set[str] = set()
    for a in f.args:
        out |= atoms(a)
    return out


def depth(f: Formula) -> int:
    if not f.args:
        return 0
    return 1 + max(depth(a) for a in f.args)


# --------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<op>[!&|()])|(?P<word>[A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"X", "U", "F", "G", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown operator {text[pos]!r}", pos, text)
        tokens.append((m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def error(self, message: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(message, self.pos(), self.text)

    def parse(self) -> Formula:
        if self.peek() == "<end>":
            raise self.error("empty formula")
        f = self.impl()
        if self.peek() == ")":
            raise self.error("unbalanced parentheses")
        if self.peek() != "<end>":
            raise self.error(f"unexpected token {self.peek()!r}")
        return f

    def impl(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = disj(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.until()
        while self.peek() == "&":
            self.take()
            left = conj(left, self.until())
        return left

    def until(self) -> Formula:
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return until(left, self.until())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in ("!", "X", "F", "G"):
            self.take()
            operand = self.unary()
            return {"!": neg, "X": next_, "F": eventually, "G": henceforth}[tok](operand)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.impl()
            if self.peek() != ")":
                raise self.error("unbalanced parentheses")
            self.take()
            return inner
        if tok == "true":
            self.take()
            return TOP
        if tok == "false":
            self.take()
            return BOTTOM
        if tok == "<end>":
            raise self.error("unexpected end of formula")
        if tok in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            raise self.error(f"unexpected token {tok!r}")
        self.take()
        return atom(tok)


def parse_formula(text: str) -> Formula:
    """Parse concrete LTLf syntax into a core-form :class:`Formula`.

    Raises:
        FormulaSyntaxError: on bad tokens, unbalanced parentheses or a
            malformed expression. ``position`` is a character offset.
    """
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printing

def _show(f: Formula) -> str:
    k = f.kind
    if k == "atom":
        return f.name  # type: ignore[return-value]
    if k == "top":
        return "true"
    if k == "next":
        return "X " + _show(f.args[0])
    if k == "until":
        a, b = f.args
        if a == TOP:
            return "F " + _show(b)
        return f"({_show(a)} U {_show(b)})"
    if k == "and":
        return f"({_show(f.args[0])} & {_show(f.args[1])})"
    # negation: recognise the sugared shapes first
    g = f.args[0]
    if g == TOP:
        return "false"
    if g.kind == "until" and g.args[0] == TOP and g.args[1].kind == "not":
        return "G " + _show(g.args[1].args[0])
    if g.kind == "and":
        a, b = g.args
        if a.kind == "not" and b.kind == "not":
            return f"({_show(a.args[0])} | {_show(b.args[0])})"
        if b.kind == "not":
            return f"({_show(a)} -> {_show(b.args[0])})"
    return "!" + _show(g)


def to_text(f: Formula) -> str:
    """Render ``f`` in the concrete grammar; ``parse_formula`` inverts it."""
    s = _show(f)
    if s.startswith("(") and s.endswith(")") and f.kind in ("and", "until", "not"):
        # strip only a single outer pair that spans the whole string
        d = 0
        for i, ch in enumerate(s):
            d += ch == "("
            d -= ch == ")"
            if d == 0 and i < len(s) - 1:
                return s
        return s[1:-1]
    return s


# --------------------------------------------------------------------------
# evaluation

def _vector(f: Formula, states: tuple[frozenset, ...], memo: dict[int, tuple[bool, ...]]) -> tuple[bool, ...]:
    key = id(f)
    hit = memo.get(key)
    if hit is not None:
        return hit
    n = len(states)
    k = f.kind
    if k == "atom":
        v = tuple(f.name in s for s in states)
    elif k == "top":
        v = (True,) * n
    elif k == "not":
        v = tuple(not x for x in _vector(f.args[0], states, memo))
    elif k == "and":
        a = _vector(f.args[0], states, memo)
        b = _vector(f.args[1], states, memo)
        v = tuple(x and y for x, y in zip(a, b))
    elif k == "next":
        a = _vector(f.args[0], states, memo)
        v = a[1:] + (False,)
    else:  # until, filled backwards from the last instant
        a = _vector(f.args[0], states, memo)
        b = _vector(f.args[1], states, memo)
        out = [False] * n
        nxt = False
        for t in range(n - 1, -1, -1):
            nxt = b[t] or (a[t] and nxt)
            out[t] = nxt
        v = tuple(out)
    memo[key] = v
    return v


@lru_cache(maxsize=65536)
def _trace_vector(f: Formula, states: tuple[frozenset, ...]) -> tuple[bool, ...]:
    return _vector(f, states, {})


def truth_vector(f: Formula, states: Iterable[frozenset]) -> tuple[bool, ...]:
    """Truth value of ``f`` at every instant of a state trace."""
    return _trace_vector(f, tuple(states))


def eval_at(f: Formula, h: History, t: int) -> bool:
    k = len(h.states) - 1
    if not 0 <= t <= k:
        raise ValueError(f"instant {t} outside 0..{k}")
    return _trace_vector(f, h.states)[t]


def holds(f: Formula, h: History) -> bool:
    return _trace_vector(f, h.states)[0]
