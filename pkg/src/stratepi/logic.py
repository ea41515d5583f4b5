"""Formula syntax trees, a text parser/printer and structural measures.

Concrete syntax::

    p  false  true  !f  f & g  f | g  f -> g  X f  K[a] f  C[{a,b}] f

Unary operators bind tightest, then ``&``, then ``|``, then ``->`` which
associates to the right.  ``&`` and ``|`` associate to the left.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ConfigError, ParseError


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Know:
    agent: str
    body: "Formula"


@dataclass(frozen=True)
class Common:
    group: frozenset[str]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "group", frozenset(self.group))
        if not self.group:
            raise ConfigError("common knowledge needs a nonempty group")


@dataclass(frozen=True)
class Next:
    body: "Formula"


Formula = Union[Prop, Bottom, Top, Implies, Not, And, Or, Know, Common, Next]

FALSE = Bottom()
TRUE = Top()


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Implies, And, Or)):
        return (f.left, f.right)
    if isinstance(f, (Not, Know, Common, Next)):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from subformulas(c)


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def kd(f: Formula) -> int:
    """Nesting depth of knowledge operators; undefined with common knowledge."""
    if isinstance(f, Common):
        raise ConfigError("K-depth is only defined for formulas without common knowledge")
    if isinstance(f, Know):
        return kd(f.body) + 1
    return max((kd(c) for c in children(f)), default=0)


def xd(f: Formula) -> int:
    """Nesting depth of next operators."""
    if isinstance(f, Next):
        return xd(f.body) + 1
    return max((xd(c) for c in children(f)), default=0)


def has_common(f: Formula) -> bool:
    return any(isinstance(g, Common) for g in subformulas(f))


def agents_of(f: Formula) -> set[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Know):
            out.add(g.agent)
        elif isinstance(g, Common):
            out |= g.group
    return out


def props_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Prop)}


def desugar(f: Formula) -> Formula:
    """Rewrite into the core connectives ``p, false, ->, K, C, X``."""
    if isinstance(f, Top):
        return Implies(FALSE, FALSE)
    if isinstance(f, Not):
        return Implies(desugar(f.body), FALSE)
    if isinstance(f, Or):
        return Implies(Implies(desugar(f.left), FALSE), desugar(f.right))
    if isinstance(f, And):
        return Implies(Implies(desugar(f.left), Implies(desugar(f.right), FALSE)), FALSE)
    if isinstance(f, Implies):
        return Implies(desugar(f.left), desugar(f.right))
    if isinstance(f, Know):
        return Know(f.agent, desugar(f.body))
    if isinstance(f, Common):
        return Common(f.group, desugar(f.body))
    if isinstance(f, Next):
        return Next(desugar(f.body))
    return f


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<sym>[!&|()\[\]{},])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    line, col = 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            out.append((kind if kind != "sym" else value, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r} but found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        return tok

    def parse(self) -> Formula:
        f = self.implication()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "arrow":
            self.next()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "|":
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, line, col = self.peek()
        if kind == "!":
            self.next()
            return Not(self.unary())
        if kind == "ident" and value == "X":
            self.next()
            return Next(self.unary())
        if kind == "ident" and value == "K" and self.peek(1)[0] == "[":
            self.next()
            self.next()
            agent = self.expect("ident")[1]
            self.expect("]")
            return Know(agent, self.unary())
        if kind == "ident" and value == "C" and self.peek(1)[0] == "[":
            self.next()
            self.next()
            self.expect("{")
            group = [self.expect("ident")[1]]
            while self.peek()[0] == ",":
                self.next()
                group.append(self.expect("ident")[1])
            self.expect("}")
            self.expect("]")
            return Common(frozenset(group), self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, line, col = self.next()
        if kind == "(":
            f = self.implication()
            self.expect(")")
            return f
        if kind == "ident":
            if value == "false":
                return FALSE
            if value == "true":
                return TRUE
            if value in ("K", "C", "X"):
                raise ParseError(f"operator {value!r} used as a proposition", line, col)
            return Prop(value)
        if kind == "eof":
            raise ParseError("unexpected end of input", line, col)
        raise ParseError(f"unknown operator {value!r}", line, col)


def parse(text: str) -> Formula:
    return _Parser(text).parse()


_IMP, _OR, _AND, _UNARY, _ATOM = range(1, 6)


def _level(f: Formula) -> int:
    if isinstance(f, Implies):
        return _IMP
    if isinstance(f, Or):
        return _OR
    if isinstance(f, And):
        return _AND
    if isinstance(f, (Not, Know, Common, Next)):
        return _UNARY
    return _ATOM


def render(f: Formula, context: int = _IMP) -> str:
    if isinstance(f, Prop):
        s = f.name
    elif isinstance(f, Bottom):
        s = "false"
    elif isinstance(f, Top):
        s = "true"
    elif isinstance(f, Implies):
        s = f"{render(f.left, _OR)} -> {render(f.right, _IMP)}"
    elif isinstance(f, Or):
        s = f"{render(f.left, _OR)} | {render(f.right, _AND)}"
    elif isinstance(f, And):
        s = f"{render(f.left, _AND)} & {render(f.right, _UNARY)}"
    elif isinstance(f, Not):
        s = "!" + render(f.body, _UNARY)
    elif isinstance(f, Know):
        s = f"K[{f.agent}] {render(f.body, _UNARY)}"
    elif isinstance(f, Common):
        s = f"C[{{{','.join(sorted(f.group))}}}] {render(f.body, _UNARY)}"
    elif isinstance(f, Next):
        s = f"X {render(f.body, _UNARY)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if _level(f) < context else s
