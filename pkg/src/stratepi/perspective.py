"""Information perspectives: sets of agent words saying who knows whose strategy.

A word ``b a`` in a perspective reads "b knows a's strategy", ``a b a`` reads
"a knows that b knows a's strategy", and so on.  A perspective is stored as a
finite set of words plus common-knowledge components; a component
``(x, G)`` stands for every word ``u x`` with ``u`` a nonempty word over ``G``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .core import DEFAULT_BUDGET, Assignment
from .errors import InputError, ResourceError

Word = tuple[str, ...]


def parse_word(text: str) -> Word:
    """``"aba"`` -> ``('a', 'b', 'a')``; dotted form ``"bob.alice"`` for long names."""
    text = text.strip()
    w = tuple(text.split(".")) if "." in text else tuple(text)
    return check_word(w)


def render_word(w: Word) -> str:
    return "".join(w) if all(len(s) == 1 for s in w) else ".".join(w)


def check_word(w: Iterable[str], min_len: int = 2) -> Word:
    w = tuple(w)
    if len(w) < min_len:
        raise InputError(f"word {render_word(w) if w else '<empty>'!r} is shorter than {min_len}")
    if any(not s for s in w):
        raise InputError(f"word {w!r} has an empty symbol")
    for x, y in zip(w, w[1:]):
        if x == y:
            raise InputError(f"word {render_word(w)!r} has adjacent repetition of {x!r}")
    return w


def words(agents: Iterable[str], min_len: int, max_len: int) -> Iterator[Word]:
    """Repetition-free words over ``agents`` with length in ``[min_len, max_len]``."""
    agents = sorted(agents)

    def grow(prefix, n):
        if n == 0:
            yield prefix
            return
        for x in agents:
            if not prefix or prefix[-1] != x:
                yield from grow(prefix + (x,), n - 1)

    for n in range(max(min_len, 1), max_len + 1):
        yield from grow((), n)


@dataclass(frozen=True, order=True)
class CkComponent:
    """``target``'s strategy is common knowledge among ``group``."""

    target: str
    group: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "group", frozenset(self.group))
        if not self.group:
            raise InputError("common-knowledge group must be nonempty")

    def contains(self, w: Word) -> bool:
        return (
            len(w) >= 2
            and w[-1] == self.target
            and all(s in self.group for s in w[:-1])
            and all(x != y for x, y in zip(w, w[1:]))
        )

    def words_upto(self, n: int) -> Iterator[Word]:
        for u in words(self.group, 1, n - 1):
            if u[-1] != self.target:
                yield u + (self.target,)

    def render(self) -> str:
        return f"{self.target} among {{{','.join(sorted(self.group))}}}"


@dataclass(frozen=True)
class InformationPerspective:
    finite: frozenset[Word] = frozenset()
    ck: frozenset[CkComponent] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "finite", frozenset(check_word(w) for w in self.finite))
        object.__setattr__(self, "ck", frozenset(self.ck))

    @classmethod
    def of(cls, *ws: str | Word, ck: Iterable[tuple[str, Iterable[str]]] = ()) -> "InformationPerspective":
        finite = [parse_word(w) if isinstance(w, str) else tuple(w) for w in ws]
        return cls(frozenset(finite), frozenset(CkComponent(x, frozenset(g)) for x, g in ck))

    def member(self, w: Word) -> bool:
        w = check_word(w)
        return w in self.finite or any(c.contains(w) for c in self.ck)

    __contains__ = member

    def informed_set(self, agent: str) -> frozenset[str]:
        """Agents whose strategy ``agent`` knows; always includes ``agent``."""
        out = {agent}
        out.update(w[1] for w in self.finite if len(w) == 2 and w[0] == agent)
        out.update(c.target for c in self.ck if agent in c.group and c.target != agent)
        return frozenset(out)

    def localize(self, agent: str) -> "InformationPerspective":
        """The perspective as seen by ``agent``.

        Finite words contribute their tail when they start with ``agent`` and
        are long enough, and are kept whole when they start with ``agent``.
        A component survives unchanged when ``agent`` belongs to its group
        and vanishes otherwise: every word of it starts with a group member.
        """
        finite = set()
        for w in self.finite:
            if w[0] == agent:
                finite.add(w)
                if len(w) >= 3:
                    finite.add(w[1:])
        return InformationPerspective(frozenset(finite), frozenset(c for c in self.ck if agent in c.group))

    def restrict(self, n: int) -> frozenset[Word]:
        out = {w for w in self.finite if len(w) <= n}
        for c in self.ck:
            out.update(c.words_upto(n))
        return frozenset(out)

    def is_truthful(self) -> bool:
        # components are suffix closed: dropping the head of u x leaves u' x
        # with u' nonempty over the same group, or a word shorter than 2
        return all(self.member(w[1:]) for w in self.finite if len(w) >= 3)

    def has_ck(self, target: str, group: Iterable[str]) -> bool:
        group = frozenset(group)
        if not group:
            raise InputError("common-knowledge group must be nonempty")
        if any(c.target == target and group <= c.group for c in self.ck):
            return True
        if len(group) == 1:
            (g,) = group
            return g == target or self.member((g, target))
        return False

    def with_words(self, extra: Iterable[Word]) -> "InformationPerspective":
        return InformationPerspective(self.finite | frozenset(extra), self.ck)

    def covers(self, other: "InformationPerspective", bound: int) -> bool:
        """Whether ``other`` is contained in ``self``.

        Finite words are compared exactly; components are compared
        structurally and additionally on all words up to ``bound``.
        """
        if not all(self.member(w) for w in other.finite):
            return False
        if not all(self.has_ck(c.target, c.group) for c in other.ck):
            return False
        return all(self.member(w) for w in other.restrict(bound))

    def canonical(self) -> "InformationPerspective":
        """Drop finite words already denoted by a component."""
        return InformationPerspective(
            frozenset(w for w in self.finite if not any(c.contains(w) for c in self.ck)), self.ck
        )

    def render(self) -> str:
        parts = []
        if self.finite:
            parts.append("words: " + ", ".join(render_word(w) for w in sorted(self.finite, key=lambda w: (len(w), w))) + ";")
        if self.ck:
            parts.append("ck: " + ", ".join(c.render() for c in sorted(self.ck, key=lambda c: (c.target, sorted(c.group)))) + ";")
        return "{ " + " ".join(parts) + " }" if parts else "{}"

    def __str__(self):
        return self.render()


EMPTY = InformationPerspective()


def fully_informed(agents: Iterable[str]) -> InformationPerspective:
    agents = frozenset(agents)
    if not agents:
        raise InputError("need at least one agent")
    return InformationPerspective(frozenset(), frozenset(CkComponent(x, agents) for x in agents))


def indist_assign(chi: Assignment, chi2: Assignment, persp: InformationPerspective, agent: str) -> bool:
    return all(chi[b] == chi2[b] for b in persp.informed_set(agent))


def successor_perspectives(
    persp: InformationPerspective,
    agent: str,
    agents: Iterable[str],
    bound: int,
    relevant: Iterable[Word] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[InformationPerspective]:
    """Perspectives ``S ∪ persp.localize(agent)`` for every admissible ``S``.

    ``S`` ranges over sets of words of length 2..``bound`` that are not
    already forced by the localized perspective.  When ``relevant`` is given
    only those words are left free; the others are fixed to absent.
    """
    if bound < 2:
        raise InputError("successor perspective bound must be at least 2")
    base = persp.localize(agent)
    candidates = words(agents, 2, bound) if relevant is None else (w for w in relevant if 2 <= len(w) <= bound)
    free = sorted({w for w in candidates if not base.member(w)}, key=lambda w: (len(w), w))
    count = 2 ** len(free)
    if count > budget:
        raise ResourceError(f"successor perspectives of {agent}", count, budget)
    out = []
    for r in range(len(free) + 1):
        for chosen in itertools.combinations(free, r):
            out.append(base.with_words(chosen))
    return out
