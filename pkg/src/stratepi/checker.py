"""Truth of epistemic-temporal formulas at states of a game structure.

A state is an assignment, an information perspective and a history.  The
knowledge operator quantifies over every accessible state, i.e. over all
indistinguishable histories, all perspectives extending the localized one
and all strategies of the agents the knower is not informed about.

The engine keeps these quantifiers finite in two ways:

* Perspectives are projected onto the *relevant words* of the formula being
  evaluated (:func:`relevant_words`).  The verdict of a formula depends on a
  perspective only through membership of these words, all of which have
  length at most ``kd + 2``.
* Strategies of uninformed agents are not enumerated as whole tables.  They
  start out as unknowns and the evaluation branches on an unknown only at the
  histories where it is actually consulted.

Common knowledge is evaluated by bounded unfolding: every chain of
accessibility steps by group members up to ``ck_depth`` is explored.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .core import (
    DEFAULT_BUDGET,
    Assignment,
    Cgs,
    History,
    Strategy,
    consistent,
    enum_indist,
    enum_strategies,
    indist_hist,
)
from .errors import ConfigError, ModelError, ResourceError
from .logic import (
    And,
    Bottom,
    Common,
    Formula,
    Implies,
    Know,
    Next,
    Not,
    Or,
    Prop,
    Top,
    agents_of,
    has_common,
    kd,
    props_of,
    xd,
)
from .perspective import EMPTY, InformationPerspective, Word, indist_assign, render_word, successor_perspectives

DEFAULT_CK_DEPTH = 6
CONTAINMENT_BOUND = 6


@dataclass(frozen=True)
class State:
    chi: Assignment
    persp: InformationPerspective
    hist: History

    @property
    def duration(self) -> int:
        return self.hist.duration

    def describe(self, cgs: Cgs | None = None, bound: int = 4) -> str:
        """History, perspective restriction and strategy digest on one line."""
        words = sorted(self.persp.restrict(bound), key=lambda w: (len(w), w))
        strategies = []
        for b, s in self.chi.strategies.items():
            if cgs is not None and len(cgs.moves[b]) == 1:
                continue
            table = ", ".join(f"{h}->{a}" for h, a in s.entries())
            strategies.append(f"{b}:[{table}{'; ' if table else ''}else {s.default}]")
        ck = "".join(f" +ck({c.render()})" for c in sorted(self.persp.ck, key=lambda c: (c.target, sorted(c.group))))
        return (
            f"hist={self.hist} I|{bound}={{{', '.join(render_word(w) for w in words)}}}{ck} "
            f"chi={' '.join(strategies) or '-'}"
        )


@dataclass(frozen=True)
class EvalConfig:
    horizon: int | None = None
    ck_depth: int = DEFAULT_CK_DEPTH
    budget: int = DEFAULT_BUDGET

    def horizon_for(self, state: State, f: Formula) -> int:
        need = state.duration + xd(f)
        if self.horizon is None:
            return need
        if self.horizon < need:
            raise ConfigError(f"horizon {self.horizon} is below duration + X-depth = {need}")
        return self.horizon


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check.

    ``kind`` is one of ``true``, ``false``, ``bounded_true`` (no common
    knowledge counterexample up to ``depth``), ``false_witness`` (a definite
    counterexample chain) and ``bounded_false`` (a formula with nested common
    knowledge that fails under the bounded reading).
    """

    kind: str
    depth: int | None = None
    chain: tuple[tuple[str, State], ...] | None = None

    @property
    def value(self) -> bool:
        return self.kind in ("true", "bounded_true")

    def __bool__(self):
        return self.value

    def render(self) -> str:
        return {
            "true": "TRUE",
            "false": "FALSE",
            "bounded_true": f"TRUE@DEPTH {self.depth}",
            "bounded_false": f"FALSE@DEPTH {self.depth}",
            "false_witness": "FALSE(witness)",
        }[self.kind]

    def __str__(self):
        return self.render()


TRUE_V = Verdict("true")
FALSE_V = Verdict("false")


# -- relations on concrete states ---------------------------------------------


def a_consistent(z: State, agent: str) -> bool:
    return consistent(z.hist, z.chi, z.persp.informed_set(agent))


def accessible(cgs: Cgs, z: State, z2: State, agent: str, bound: int = CONTAINMENT_BOUND) -> bool:
    return (
        indist_assign(z.chi, z2.chi, z.persp, agent)
        and z2.persp.covers(z.persp.localize(agent), bound)
        and indist_hist(cgs, agent, z.hist, z2.hist)
        and a_consistent(z, agent)
        and a_consistent(z2, agent)
    )


def _perspective_bound(f: Formula, cfg: EvalConfig) -> int:
    return (cfg.ck_depth if has_common(f) else kd(f)) + 2


def successors(cgs: Cgs, z: State, agent: str, body: Formula, cfg: EvalConfig = EvalConfig()) -> list[State]:
    """Explicit representatives of every state accessible from ``z`` for ``agent``.

    Informed agents keep their strategies, the others range over all tables
    of the configured horizon, perspectives range over
    :func:`successor_perspectives` with bound ``kd(body) + 2``.
    """
    if not a_consistent(z, agent):
        return []
    horizon = cfg.horizon if cfg.horizon is not None else z.duration + xd(body)
    informed = z.persp.informed_set(agent)
    hists = [h for h in enum_indist(cgs, agent, z.hist)]
    persps = successor_perspectives(z.persp, agent, cgs.agents, _perspective_bound(body, cfg), budget=cfg.budget)
    choices = []
    for b in cgs.agents:
        if b in informed:
            choices.append([z.chi[b]])
        else:
            choices.append(list(enum_strategies(cgs, horizon, b, budget=cfg.budget)))
    total = len(hists) * len(persps)
    for c in choices:
        total *= len(c)
    if total > cfg.budget:
        raise ResourceError(f"successor states of {agent}", total, cfg.budget)
    out = []
    for combo in itertools.product(*choices):
        chi2 = Assignment(dict(zip(cgs.agents, combo)))
        for p2 in persps:
            informed2 = p2.informed_set(agent)
            for h2 in hists:
                if consistent(h2, chi2, informed2):
                    out.append(State(chi2, p2, h2))
    return out


# -- relevant words -------------------------------------------------------------


def _pairs(agent: str, agents: Iterable[str]) -> frozenset[Word]:
    return frozenset((agent, y) for y in agents if y != agent)


def _know_relevant(agent: str, agents, inner: frozenset[Word]) -> frozenset[Word]:
    out = set(_pairs(agent, agents))
    for w in inner:
        if w[0] == agent:
            out.add(w)
        else:
            out.add((agent,) + w)
    return frozenset(out)


def ck_chains(group: Iterable[str], depth: int) -> list[tuple[str, ...]]:
    """Agent sequences without adjacent repetition, shortest first."""
    group = sorted(group)
    out = []
    layer = [(x,) for x in group]
    for _ in range(depth):
        out.extend(layer)
        layer = [c + (y,) for c in layer for y in group if y != c[-1]]
    return out


def chain_formula(chain: tuple[str, ...], body: Formula) -> Formula:
    f = body
    for x in reversed(chain):
        f = Know(x, f)
    return f


def relevant_words(f: Formula, agents: Iterable[str], ck_depth: int = DEFAULT_CK_DEPTH, _cache=None) -> frozenset[Word]:
    """Words whose membership can influence the truth value of ``f``."""
    agents = tuple(sorted(agents))
    cache = {} if _cache is None else _cache
    key = (f, agents, ck_depth)
    if key in cache:
        return cache[key]
    if isinstance(f, (Prop, Bottom, Top)):
        out = frozenset()
    elif isinstance(f, (Implies, And, Or)):
        out = relevant_words(f.left, agents, ck_depth, cache) | relevant_words(f.right, agents, ck_depth, cache)
    elif isinstance(f, (Not, Next)):
        out = relevant_words(f.body, agents, ck_depth, cache)
    elif isinstance(f, Know):
        out = _know_relevant(f.agent, agents, relevant_words(f.body, agents, ck_depth, cache))
    elif isinstance(f, Common):
        base = relevant_words(f.body, agents, ck_depth, cache)
        layer = {x: _know_relevant(x, agents, base) for x in f.group}
        out = set().union(*layer.values())
        for _ in range(ck_depth - 1):
            layer = {
                x: _know_relevant(x, agents, frozenset().union(*(layer[y] for y in f.group if y != x)))
                for x in f.group
            }
            out |= set().union(*layer.values())
        out = frozenset(out)
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[key] = out
    return out


# -- the engine -------------------------------------------------------------------


class _Unknown:
    """A strategy not yet pinned down; its values live in the environment."""

    __slots__ = ("id", "agent")

    def __init__(self, ident: int, agent: str):
        self.id = ident
        self.agent = agent

    def __repr__(self):
        return f"?{self.agent}{self.id}"


class _Miss(Exception):
    def __init__(self, var: _Unknown, hist: History):
        self.var = var
        self.hist = hist


class _Engine:
    def __init__(self, cgs: Cgs, cfg: EvalConfig):
        self.cgs = cgs
        self.cfg = cfg
        self.agents = cgs.agents
        self.index = {b: i for i, b in enumerate(cgs.agents)}
        self.memo: dict = {}
        self.rel_cache: dict = {}
        self.indist_cache: dict = {}
        self.prefix_cache: dict = {}
        self.fresh_ids = itertools.count()
        self.labels = cgs.labels
        self.transitions = cgs.transitions

    # bookkeeping
    def rel(self, f: Formula) -> frozenset[Word]:
        return relevant_words(f, self.agents, self.cfg.ck_depth, self.rel_cache)

    def indist(self, agent: str, h: History) -> list[History]:
        key = (agent, h)
        out = self.indist_cache.get(key)
        if out is None:
            out = self.indist_cache[key] = enum_indist(self.cgs, agent, h)
        return out

    def prefixes(self, h: History) -> list[History]:
        out = self.prefix_cache.get(h)
        if out is None:
            out = self.prefix_cache[h] = [h.prefix(i) for i in range(h.duration)]
        return out

    @staticmethod
    def lookup(s, h: History, env: dict) -> str:
        if isinstance(s, Strategy):
            return s(h)
        known = env.get(s.id)
        if known is None or h not in known:
            raise _Miss(s, h)
        return known[h]

    def chi_key(self, chi: tuple, env: dict):
        return tuple(
            s if isinstance(s, Strategy) else frozenset(env.get(s.id, {}).items()) for s in chi
        )

    def informed(self, agent: str, persp: frozenset[Word]) -> frozenset[str]:
        return frozenset([agent] + [w[1] for w in persp if len(w) == 2 and w[0] == agent])

    def is_consistent(self, chi: tuple, h: History, informed: frozenset[str], env: dict) -> bool:
        for prefix, alpha in zip(self.prefixes(h), h.joints):
            for b, act in alpha:
                if b in informed and self.lookup(chi[self.index[b]], prefix, env) != act:
                    return False
        return True

    def search(self, fresh: set[int], probe, env: dict):
        """Branch on the unknowns in ``fresh`` until ``probe`` returns non-None.

        ``probe`` is called with an environment; consulting an unknown from
        ``fresh`` that the environment does not define splits the search over
        the agent's actions.  Unknowns owned by an outer quantifier propagate.
        """
        stack = [env]
        while stack:
            e = stack.pop()
            try:
                found = probe(e)
            except _Miss as miss:
                if miss.var.id not in fresh:
                    raise
                for act in reversed(self.cgs.moves[miss.var.agent]):
                    table = dict(e.get(miss.var.id, {}))
                    table[miss.hist] = act
                    e2 = dict(e)
                    e2[miss.var.id] = table
                    stack.append(e2)
                continue
            if found is not None:
                return found
        return None

    # evaluation
    def holds(self, chi: tuple, persp: frozenset[Word], h: History, f: Formula, env: dict) -> bool:
        if isinstance(f, Prop):
            return f.name in self.labels[h.last]
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Top):
            return True
        persp = persp & self.rel(f)
        key = (self.chi_key(chi, env), persp, h, f)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        result = self._eval(chi, persp, h, f, env)
        self.memo[key] = result
        return result

    def _eval(self, chi, persp, h, f, env) -> bool:
        if isinstance(f, Not):
            return not self.holds(chi, persp, h, f.body, env)
        if isinstance(f, Implies):
            return not self.holds(chi, persp, h, f.left, env) or self.holds(chi, persp, h, f.right, env)
        if isinstance(f, And):
            return self.holds(chi, persp, h, f.left, env) and self.holds(chi, persp, h, f.right, env)
        if isinstance(f, Or):
            return self.holds(chi, persp, h, f.left, env) or self.holds(chi, persp, h, f.right, env)
        if isinstance(f, Next):
            return self.holds(chi, persp, self.advance(chi, h, env), f.body, env)
        if isinstance(f, Know):
            return self.know_counterexample(chi, persp, h, f.agent, f.body, env) is None
        if isinstance(f, Common):
            return all(
                self.holds(chi, persp, h, chain_formula(c, f.body), env)
                for c in ck_chains(f.group, self.cfg.ck_depth)
            )
        raise TypeError(f"not a formula: {f!r}")

    def advance(self, chi, h: History, env) -> History:
        alpha = tuple((b, self.lookup(chi[i], h, env)) for i, b in enumerate(self.agents))
        return h.extend(alpha, self.transitions[(h.last, alpha)])

    def successor_space(self, chi, persp, h, agent, body):
        """Forced words, free words and candidate histories for one knowledge step."""
        words = self.rel(body) | _pairs(agent, self.agents)
        forced = frozenset(
            w for w in words if (agent,) + w in persp or (w[0] == agent and w in persp)
        )
        free = sorted(words - forced, key=lambda w: (len(w), w))
        hists = self.indist(agent, h)
        count = len(hists) << len(free)
        if count > self.cfg.budget:
            raise ResourceError(f"successors of {agent}", count, self.cfg.budget)
        return forced, free, hists

    def know_counterexample(self, chi, persp, h, agent, body, env, explain=False):
        """Find an accessible state falsifying ``body``; None if there is none.

        Returns ``(env, chi2, words_added, persp2, h2, detail)`` where ``detail``
        is a nested explanation when ``explain`` is set.
        """
        informed = self.informed(agent, persp)
        if not self.is_consistent(chi, h, informed, env):
            return None
        forced, free, hists = self.successor_space(chi, persp, h, agent, body)
        for h2 in hists:
            for r in range(len(free) + 1):
                for added in itertools.combinations(free, r):
                    persp2 = forced | frozenset(added)
                    informed2 = self.informed(agent, persp2)
                    chi2 = tuple(
                        s if b in informed else _Unknown(next(self.fresh_ids), b)
                        for b, s in zip(self.agents, chi)
                    )
                    fresh = {s.id for s in chi2 if isinstance(s, _Unknown)} - {
                        s.id for s in chi if isinstance(s, _Unknown)
                    }

                    def probe(e, chi2=chi2, persp2=persp2, h2=h2, informed2=informed2, added=added):
                        if not self.is_consistent(chi2, h2, informed2, e):
                            return None
                        if self.holds(chi2, persp2, h2, body, e):
                            return None
                        detail = self.explain(chi2, persp2, h2, body, e) if explain else None
                        return (e, chi2, added, persp2, h2, detail)

                    found = self.search(fresh, probe, env)
                    if found is not None:
                        return found
        return None

    def explain(self, chi, persp, h, f, env) -> list:
        """Steps ``(label, chi, words_added, h, env)`` leading to falsity of ``f``."""
        persp = persp & self.rel(f)
        if isinstance(f, Implies):
            return self.explain(chi, persp, h, f.right, env)
        if isinstance(f, Or):
            return self.explain(chi, persp, h, f.left, env)
        if isinstance(f, And):
            part = f.left if not self.holds(chi, persp, h, f.left, env) else f.right
            return self.explain(chi, persp, h, part, env)
        if isinstance(f, Next):
            h2 = self.advance(chi, h, env)
            return [("X", chi, None, h2, env)] + self.explain(chi, persp, h2, f.body, env)
        if isinstance(f, Know):
            found = self.know_counterexample(chi, persp, h, f.agent, f.body, env, explain=True)
            if found is None:
                return []
            e, chi2, added, _persp2, h2, detail = found
            return [(f.agent, chi2, added, h2, e)] + detail
        if isinstance(f, Common):
            for c in ck_chains(f.group, self.cfg.ck_depth):
                g = chain_formula(c, f.body)
                if not self.holds(chi, persp, h, g, env):
                    return self.explain(chi, persp, h, g, env)
        return []


def _materialize(cgs: Cgs, chi: tuple, env: dict) -> Assignment:
    out = {}
    for b, s in zip(cgs.agents, chi):
        if isinstance(s, Strategy):
            out[b] = s
        else:
            out[b] = Strategy.of(env.get(s.id, {}), cgs.moves[b][0])
    return Assignment(out)


def _concretize_steps(cgs: Cgs, z: State, steps: list, keep: int | None = None) -> tuple[tuple[str, State], ...]:
    """Turn engine steps into concrete states (unknowns get default fillers).

    Environments only grow along an explanation, so the last one pins down
    every unknown consulted anywhere on the path.
    """
    final = {}
    for *_, env in steps:
        for ident, table in env.items():
            final.setdefault(ident, {}).update(table)
    out = []
    persp = z.persp
    for label, chi, added, h, _env in steps[:keep]:
        env = final
        if label != "X":
            persp = persp.localize(label).with_words(added)
        out.append((label, State(_materialize(cgs, chi, env), persp, h)))
    return tuple(out)


def validate_state(cgs: Cgs, z: State) -> None:
    z.chi.validate(cgs)
    cgs.validate_history(z.hist)
    if z.hist.start not in cgs.initial:
        raise ModelError(f"history {z.hist} does not start at an initial position")


def _validate_formula(cgs: Cgs, f: Formula) -> None:
    unknown = agents_of(f) - set(cgs.agents)
    if unknown:
        raise ConfigError(f"formula mentions unknown agents {sorted(unknown)}")
    props = set().union(*cgs.labels.values()) if cgs.labels else set()
    missing = props_of(f) - props
    # propositions that label no position are simply false everywhere
    del missing


def _prepare(cgs: Cgs, z: State, f: Formula, cfg: EvalConfig):
    validate_state(cgs, z)
    _validate_formula(cgs, f)
    cfg.horizon_for(z, f)
    engine = _Engine(cgs, cfg)
    chi = tuple(z.chi[b] for b in cgs.agents)
    persp = frozenset(w for w in engine.rel(f) if z.persp.member(w))
    return engine, chi, persp


def check(cgs: Cgs, z: State, f: Formula, cfg: EvalConfig = EvalConfig(), trace: bool = False) -> Verdict:
    """Evaluate ``f`` at ``z``.

    Formulas without common knowledge get an exact ``TRUE``/``FALSE``.  A
    top-level ``C[G]`` is delegated to :func:`check_common`; common knowledge
    nested deeper yields the bounded verdict kinds.  With ``trace`` a false
    verdict carries the chain of states that refutes it.
    """
    if isinstance(f, Common):
        return check_common(cgs, z, f.group, f.body, cfg)
    engine, chi, persp = _prepare(cgs, z, f, cfg)
    value = engine.holds(chi, persp, z.hist, f, {})
    bounded = has_common(f)
    if value:
        return Verdict("bounded_true", cfg.ck_depth) if bounded else TRUE_V
    chain = None
    if trace:
        chain = _concretize_steps(cgs, z, engine.explain(chi, persp, z.hist, f, {}))
    return Verdict("bounded_false" if bounded else "false", cfg.ck_depth if bounded else None, chain)


def check_common(cgs: Cgs, z: State, group: Iterable[str], body: Formula, cfg: EvalConfig = EvalConfig()) -> Verdict:
    """Search accessibility chains of group members for a state refuting ``body``.

    Chains have at least one step and at most ``cfg.ck_depth``; ``z`` itself
    is not required to satisfy ``body``.  Chains are tried shortest first, so
    a returned witness is of minimal length.
    """
    group = frozenset(group)
    f = Common(group, body)
    engine, chi, persp = _prepare(cgs, z, f, cfg)
    for c in ck_chains(group, cfg.ck_depth):
        g = chain_formula(c, body)
        if not engine.holds(chi, persp, z.hist, g, {}):
            steps = engine.explain(chi, persp, z.hist, g, {})
            return Verdict("false_witness", cfg.ck_depth, _concretize_steps(cgs, z, steps, len(c)))
    return Verdict("bounded_true", cfg.ck_depth)


def holds(cgs: Cgs, z: State, f: Formula, cfg: EvalConfig = EvalConfig()) -> bool:
    return bool(check(cgs, z, f, cfg))


def initial_state(chi: Assignment, persp: InformationPerspective = EMPTY, hist: History | None = None,
                  cgs: Cgs | None = None, position: str | None = None) -> State:
    if hist is None:
        hist = History.initial(position if position is not None else cgs.initial[0])
    return State(chi, persp, hist)
