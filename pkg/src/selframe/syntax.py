"""Formulas of conditional weak positive logic and consequence pairs.

Concrete ASCII grammar::

    pair    := formula "|-" formula
    formula := or_f ("~>" formula)?
    or_f    := and_f ("\\/" and_f)*
    and_f   := atom_f ("/\\" atom_f)*
    atom_f  := "T" | "F" | ATOM | "(" formula ")"

``~>`` is right-associative and binds loosest; ``/\\`` and ``\\/`` associate
to the left.  Atoms match ``[a-z][a-zA-Z0-9_]*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Prop", "Top", "Bot", "And", "Or", "Cto", "Formula", "TOP", "BOT",
    "ConsequencePair", "TheoryGamma", "ParseError",
    "parse_formula", "parse_pair", "print_formula", "print_pair",
    "substitute", "subformulas", "atoms", "depth", "size", "conjuncts",
    "big_and",
]

ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Prop:
    name: str

    def __post_init__(self) -> None:
        if not ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Top:
    def __str__(self) -> str:
        return "T"


@dataclass(frozen=True, slots=True)
class Bot:
    def __str__(self) -> str:
        return "F"


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Cto:
    """Conditional implication ``left ~> right``."""

    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


Formula = Union[Prop, Top, Bot, And, Or, Cto]
TOP = Top()
BOT = Bot()


@dataclass(frozen=True, slots=True)
class ConsequencePair:
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return print_pair(self)


class TheoryGamma(tuple):
    """An ordered, duplicate-free collection of consequence pairs."""

    def __new__(cls, pairs: Iterable[ConsequencePair] = ()):
        seen: dict[ConsequencePair, None] = {}
        for cp in pairs:
            if not isinstance(cp, ConsequencePair):
                raise TypeError(f"expected ConsequencePair, got {type(cp).__name__}")
            seen.setdefault(cp, None)
        return super().__new__(cls, seen)

    @property
    def pairs(self) -> tuple[ConsequencePair, ...]:
        return tuple(self)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op>~>|/\\|\\/|\|-|\(|\))|(?P<kw>[TF])(?![a-zA-Z0-9_])"
    r"|(?P<atom>[a-z][a-zA-Z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group("op") or m.group("kw") or m.group("atom")
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.or_f()
        if self.peek() == "~>":
            self.take()
            return Cto(left, self.formula())
        return left

    def or_f(self) -> Formula:
        f = self.and_f()
        while self.peek() == "\\/":
            self.take()
            f = Or(f, self.and_f())
        return f

    def and_f(self) -> Formula:
        f = self.atom_f()
        while self.peek() == "/\\":
            self.take()
            f = And(f, self.atom_f())
        return f

    def atom_f(self) -> Formula:
        tok = self.peek()
        if tok == "T":
            self.take()
            return TOP
        if tok == "F":
            self.take()
            return BOT
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if ATOM_RE.match(tok) and tok != "<end>":
            self.take()
            return Prop(tok)
        raise ParseError(f"expected a formula, found {tok!r}", self.pos())


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "<end>":
        raise ParseError(f"unexpected token {p.peek()!r}", p.pos())
    return f


def parse_pair(text: str) -> ConsequencePair:
    p = _Parser(text)
    turnstiles = [pos for tok, pos in p.tokens if tok == "|-"]
    if not turnstiles:
        raise ParseError("missing '|-'", len(text))
    if len(turnstiles) > 1:
        raise ParseError("duplicated '|-'", turnstiles[1])
    lhs = p.formula()
    p.take("|-")
    rhs = p.formula()
    if p.peek() != "<end>":
        raise ParseError(f"unexpected token {p.peek()!r}", p.pos())
    return ConsequencePair(lhs, rhs)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

# binding strength: higher binds tighter
_PREC = {Cto: 1, Or: 2, And: 3}


def print_formula(f: Formula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    prec = _PREC[type(f)]
    sym = {And: "/\\", Or: "\\/", Cto: "~>"}[type(f)]
    left, right = print_formula(f.left), print_formula(f.right)
    lp = _PREC.get(type(f.left), 4)
    rp = _PREC.get(type(f.right), 4)
    if isinstance(f, Cto):
        # right-associative
        if lp <= prec:
            left = f"({left})"
    else:
        # left-associative
        if lp < prec:
            left = f"({left})"
        if rp <= prec:
            right = f"({right})"
    return f"{left} {sym} {right}"


def print_pair(cp: ConsequencePair) -> str:
    return f"{print_formula(cp.lhs)} |- {print_formula(cp.rhs)}"


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------

def substitute(f: Formula, m: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution; atoms outside ``m`` are left alone."""
    if isinstance(f, Prop):
        return m.get(f.name, f)
    if isinstance(f, (Top, Bot)):
        return f
    return type(f)(substitute(f.left, m), substitute(f.right, m))


def subformulas(f: Formula) -> frozenset[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (And, Or, Cto)):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def atoms(*fs: Formula) -> list[str]:
    """Atom names occurring in ``fs``, sorted."""
    names = set()
    for f in fs:
        names.update(g.name for g in subformulas(f) if isinstance(g, Prop))
    return sorted(names)


def depth(f: Formula) -> int:
    if isinstance(f, (Prop, Top, Bot)):
        return 0
    return 1 + max(depth(f.left), depth(f.right))


def size(f: Formula) -> int:
    if isinstance(f, (Prop, Top, Bot)):
        return 1
    return 1 + size(f.left) + size(f.right)


def conjuncts(f: Formula) -> Iterator[Formula]:
    """Leaves of the maximal ``And`` tree at the root of ``f``, left to right."""
    if isinstance(f, And):
        yield from conjuncts(f.left)
        yield from conjuncts(f.right)
    else:
        yield f


def big_and(fs: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``T``."""
    out: Formula | None = None
    for f in fs:
        out = f if out is None else And(out, f)
    return TOP if out is None else out
