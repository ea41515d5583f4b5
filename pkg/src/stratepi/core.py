"""Concurrent game structures, histories, strategies and assignments.

Joint actions are tuples of ``(agent, action)`` pairs sorted by agent name, so
they hash cheaply and render deterministically.  Histories are immutable and
carry no reference to their structure; validity is checked against a
:class:`Cgs` when they are built through it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ModelError, ResourceError

JointAction = tuple[tuple[str, str], ...]

DEFAULT_BUDGET = 200_000


def check_identifier(name: str, kind: str = "identifier") -> str:
    if not isinstance(name, str) or not name or any(c.isspace() for c in name):
        raise ModelError(f"invalid {kind} {name!r}")
    return name


def joint(choice: Mapping[str, str]) -> JointAction:
    return tuple(sorted(choice.items()))


def joint_get(alpha: JointAction, agent: str) -> str:
    for b, act in alpha:
        if b == agent:
            return act
    raise ModelError(f"joint action has no entry for agent {agent!r}")


@dataclass(frozen=True)
class History:
    positions: tuple[str, ...]
    joints: tuple[JointAction, ...] = ()

    def __post_init__(self):
        if not self.positions:
            raise ModelError("a history needs at least one position")
        if len(self.joints) != len(self.positions) - 1:
            raise ModelError("history must alternate positions and joint actions")

    @classmethod
    def initial(cls, position: str) -> "History":
        return cls((position,), ())

    @property
    def duration(self) -> int:
        return len(self.joints)

    @property
    def start(self) -> str:
        return self.positions[0]

    @property
    def last(self) -> str:
        return self.positions[-1]

    def prefix(self, i: int) -> "History":
        """The prefix ending at position index ``i`` (duration ``i``)."""
        return History(self.positions[: i + 1], self.joints[:i])

    def extend(self, alpha: JointAction, position: str) -> "History":
        return History(self.positions + (position,), self.joints + (alpha,))

    def sort_key(self):
        return (self.duration, self.positions, self.joints)

    def render(self) -> str:
        parts = [self.positions[0]]
        for alpha, v in zip(self.joints, self.positions[1:]):
            parts.append("(" + ",".join(f"{b}:{a}" for b, a in alpha) + ")")
            parts.append(v)
        return " ".join(parts)

    def __str__(self):
        return self.render()


def _blocks_to_index(blocks, carrier, what):
    index = {}
    for i, block in enumerate(blocks):
        for item in block:
            if item not in carrier:
                raise ModelError(f"{what} partition mentions unknown element {item!r}")
            if item in index:
                raise ModelError(f"{what} partition blocks overlap on {item!r}")
            index[item] = i
    missing = set(carrier) - set(index)
    if missing:
        raise ModelError(f"{what} partition does not cover {sorted(missing)}")
    return index


def _normalize_blocks(blocks: Iterable[Iterable[str]] | None, carrier) -> tuple[frozenset, ...]:
    """Complete a partial partition with singleton blocks and sort it."""
    blocks = [frozenset(b) for b in (blocks or ()) if b]
    covered = set().union(*blocks) if blocks else set()
    blocks += [frozenset([x]) for x in carrier if x not in covered]
    return tuple(sorted(blocks, key=lambda b: sorted(b)))


@dataclass(frozen=True)
class Cgs:
    """A concurrent game structure.

    ``moves`` gives each agent's available actions (all of ``actions`` unless
    restricted); joint actions range over the product of these sets and the
    transition map must be total on it.  Observation relations are given as
    partitions of positions and of actions, one pair per agent.
    """

    agents: tuple[str, ...]
    actions: tuple[str, ...]
    positions: tuple[str, ...]
    transitions: Mapping[tuple[str, JointAction], str]
    labels: Mapping[str, frozenset[str]]
    position_obs: Mapping[str, tuple[frozenset[str], ...]]
    action_obs: Mapping[str, tuple[frozenset[str], ...]]
    moves: Mapping[str, tuple[str, ...]]
    initial: tuple[str, ...]
    _pos_class: dict = field(default=None, compare=False, repr=False)
    _act_class: dict = field(default=None, compare=False, repr=False)

    @classmethod
    def build(
        cls,
        agents: Iterable[str],
        actions: Iterable[str],
        positions: Iterable[str],
        transitions: Iterable[tuple[str, Mapping[str, str] | JointAction, str]] = (),
        labels: Mapping[str, Iterable[str]] | None = None,
        position_obs: Mapping[str, Iterable[Iterable[str]]] | None = None,
        action_obs: Mapping[str, Iterable[Iterable[str]]] | None = None,
        moves: Mapping[str, Iterable[str]] | None = None,
        initial: Iterable[str] | None = None,
        defaults: Mapping[str, str] | None = None,
    ) -> "Cgs":
        """Validate and normalize the pieces of a structure.

        ``defaults`` maps a position to the successor used for every joint
        action not listed explicitly in ``transitions``.
        """
        agents = tuple(sorted(check_identifier(a, "agent") for a in agents))
        actions = tuple(sorted(check_identifier(a, "action") for a in actions))
        positions = tuple(sorted(check_identifier(v, "position") for v in positions))
        for what, seq in (("agent", agents), ("action", actions), ("position", positions)):
            if len(set(seq)) != len(seq):
                raise ModelError(f"duplicate {what} identifier")
        if not agents:
            raise ModelError("a structure needs at least one agent")
        moves = dict(moves or {})
        for b in moves:
            if b not in agents:
                raise ModelError(f"moves given for unknown agent {b!r}")
        norm_moves = {}
        for b in agents:
            avail = tuple(sorted(set(moves.get(b, actions))))
            if not avail:
                raise ModelError(f"agent {b!r} has no available action")
            for act in avail:
                if act not in actions:
                    raise ModelError(f"unknown action {act!r} for agent {b!r}")
            norm_moves[b] = avail

        table: dict[tuple[str, JointAction], str] = {}
        for v, alpha, target in transitions:
            if not isinstance(alpha, tuple):
                alpha = joint(alpha)
            key = (v, alpha)
            if key in table and table[key] != target:
                raise ModelError(f"conflicting transitions from {v} under {alpha}")
            table[key] = target
        defaults = dict(defaults or {})
        all_joints = [tuple(zip(agents, combo)) for combo in itertools.product(*(norm_moves[b] for b in agents))]
        for v in positions:
            for alpha in all_joints:
                if (v, alpha) not in table:
                    if v not in defaults:
                        raise ModelError(
                            f"transition function not total: no successor for {v} under "
                            + ",".join(f"{b}:{a}" for b, a in alpha)
                        )
                    table[(v, alpha)] = defaults[v]
        for (v, alpha), target in table.items():
            if v not in positions or target not in positions:
                raise ModelError(f"transition mentions unknown position ({v} -> {target})")
            if alpha not in all_joints:
                raise ModelError(f"transition from {v} uses an unavailable joint action {alpha}")

        labels = dict(labels or {})
        for v in labels:
            if v not in positions:
                raise ModelError(f"labels mention unknown position {v!r}")
        labels = {v: frozenset(check_identifier(p, "proposition") for p in labels.get(v, ())) for v in positions}
        pobs = {b: _normalize_blocks((position_obs or {}).get(b), positions) for b in agents}
        aobs = {b: _normalize_blocks((action_obs or {}).get(b), actions) for b in agents}
        for m in (position_obs or {}, action_obs or {}):
            for b in m:
                if b not in agents:
                    raise ModelError(f"observation partition for unknown agent {b!r}")
        init = tuple(sorted(set(initial))) if initial is not None else positions
        for v in init:
            if v not in positions:
                raise ModelError(f"unknown initial position {v!r}")
        return cls(agents, actions, positions, table, labels, pobs, aobs, norm_moves, init)

    def __post_init__(self):
        object.__setattr__(
            self, "_pos_class",
            {b: _blocks_to_index(self.position_obs[b], self.positions, "position") for b in self.agents},
        )
        object.__setattr__(
            self, "_act_class",
            {b: _blocks_to_index(self.action_obs[b], self.actions, "action") for b in self.agents},
        )

    # -- observation relations -------------------------------------------
    def same_position(self, agent: str, v: str, w: str) -> bool:
        cls = self._pos_class[agent]
        return cls[v] == cls[w]

    def same_action(self, agent: str, x: str, y: str) -> bool:
        cls = self._act_class[agent]
        return cls[x] == cls[y]

    def same_joint(self, agent: str, alpha: JointAction, beta: JointAction) -> bool:
        cls = self._act_class[agent]
        return all(cls[x] == cls[y] for (_, x), (_, y) in zip(alpha, beta))

    # -- transitions -----------------------------------------------------
    def joint_actions(self) -> list[JointAction]:
        return [
            tuple(zip(self.agents, combo))
            for combo in itertools.product(*(self.moves[b] for b in self.agents))
        ]

    def history(self, *items) -> History:
        """Build a validated history from alternating positions and joints.

        Joint actions may be given as mappings or as a single action name,
        which is then taken to be the move of every agent able to play it
        (agents lacking it play their only action).
        """
        positions = list(items[0::2])
        joints = [self.coerce_joint(x) for x in items[1::2]]
        h = History(tuple(positions), tuple(joints))
        self.validate_history(h)
        return h

    def coerce_joint(self, x) -> JointAction:
        if isinstance(x, str):
            choice = {}
            for b in self.agents:
                if x in self.moves[b]:
                    choice[b] = x
                elif len(self.moves[b]) == 1:
                    choice[b] = self.moves[b][0]
                else:
                    raise ModelError(f"cannot lift action {x!r} to a joint action for agent {b!r}")
            return joint(choice)
        if isinstance(x, tuple):
            return x
        return joint(x)

    def validate_history(self, h: History) -> None:
        for v in h.positions:
            if v not in self._pos_class[self.agents[0]]:
                raise ModelError(f"unknown position {v!r} in history")
        for i, alpha in enumerate(h.joints):
            if step(self, h.positions[i], alpha) != h.positions[i + 1]:
                raise ModelError(f"history {h} does not follow the transition function at step {i + 1}")

    def histories(self, max_duration: int, starts: Iterable[str] | None = None) -> list[History]:
        """All histories from ``starts`` (default: initial positions) up to a duration."""
        frontier = [History.initial(v) for v in (self.initial if starts is None else starts)]
        out = list(frontier)
        joints = self.joint_actions()
        for _ in range(max_duration):
            frontier = [h.extend(a, self.transitions[(h.last, a)]) for h in frontier for a in joints]
            out.extend(frontier)
        return out


def step(cgs: Cgs, v: str, alpha: JointAction) -> str:
    try:
        return cgs.transitions[(v, alpha)]
    except KeyError:
        raise ModelError(f"no transition from {v!r} under {alpha!r}") from None


def indist_hist(cgs: Cgs, agent: str, h1: History, h2: History) -> bool:
    if h1.duration != h2.duration:
        return False
    if not all(cgs.same_position(agent, v, w) for v, w in zip(h1.positions, h2.positions)):
        return False
    return all(cgs.same_joint(agent, x, y) for x, y in zip(h1.joints, h2.joints))


def enum_indist(cgs: Cgs, agent: str, h: History) -> list[History]:
    """Histories the agent cannot tell apart from ``h``.

    Candidates start at an initial position (or at ``h``'s own start) and are
    grown blockwise: each step keeps only joint actions and successor
    positions in the same observation class as ``h``'s.
    """
    starts = [v for v in cgs.positions
              if (v in cgs.initial or v == h.start) and cgs.same_position(agent, v, h.start)]
    frontier = [History.initial(v) for v in starts]
    joints = cgs.joint_actions()
    for i, alpha in enumerate(h.joints):
        target = h.positions[i + 1]
        nxt = []
        for g in frontier:
            for beta in joints:
                if not cgs.same_joint(agent, alpha, beta):
                    continue
                w = cgs.transitions[(g.last, beta)]
                if cgs.same_position(agent, w, target):
                    nxt.append(g.extend(beta, w))
        frontier = nxt
    return sorted(frontier, key=History.sort_key)


@dataclass(frozen=True)
class Strategy:
    """A decision table plus a default action.

    Table entries equal to the default are dropped on construction, so two
    strategies compare equal exactly when they behave identically on every
    history.
    """

    table: frozenset[tuple[History, str]]
    default: str
    horizon: int = field(default=-1, compare=False)
    _lookup: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        entries = {h: a for h, a in self.table}
        if len(entries) != len(self.table):
            raise ModelError("strategy table maps one history to two actions")
        kept = {h: a for h, a in entries.items() if a != self.default}
        object.__setattr__(self, "table", frozenset(kept.items()))
        object.__setattr__(self, "_lookup", kept)
        if self.horizon < 0:
            object.__setattr__(self, "horizon", 1 + max((h.duration for h in entries), default=-1))
        elif any(h.duration >= self.horizon for h in entries):
            raise ModelError("strategy table has a key beyond its horizon")

    @classmethod
    def of(cls, table: Mapping[History, str], default: str, horizon: int = -1) -> "Strategy":
        return cls(frozenset(table.items()), default, horizon)

    @classmethod
    def constant(cls, action: str) -> "Strategy":
        return cls(frozenset(), action, 0)

    def __call__(self, h: History) -> str:
        if h.duration >= self.horizon:
            return self.default
        return self._lookup.get(h, self.default)

    def entries(self) -> list[tuple[History, str]]:
        return sorted(self._lookup.items(), key=lambda kv: kv[0].sort_key())


@dataclass(frozen=True, eq=True)
class Assignment:
    strategies: Mapping[str, Strategy]

    def __post_init__(self):
        object.__setattr__(self, "strategies", dict(sorted(self.strategies.items())))

    def __getitem__(self, agent: str) -> Strategy:
        return self.strategies[agent]

    def __hash__(self):
        return hash(tuple(self.strategies.items()))

    def agents(self):
        return tuple(self.strategies)

    def replace(self, **changes: Strategy) -> "Assignment":
        return Assignment({**self.strategies, **changes})

    def validate(self, cgs: Cgs) -> None:
        if set(self.strategies) != set(cgs.agents):
            raise ModelError("assignment must give a strategy to every agent")
        for b, s in self.strategies.items():
            acts = {s.default} | {a for _, a in s.table}
            bad = acts - set(cgs.moves[b])
            if bad:
                raise ModelError(f"strategy of {b!r} uses unavailable actions {sorted(bad)}")
            for h, _ in s.table:
                cgs.validate_history(h)


def consistent(h: History, chi: Assignment, agents: Iterable[str]) -> bool:
    agents = set(agents)
    for i, alpha in enumerate(h.joints):
        prefix = h.prefix(i)
        for b, act in alpha:
            if b in agents and chi[b](prefix) != act:
                return False
    return True


def continue_one_step(cgs: Cgs, chi: Assignment, h: History) -> History:
    alpha = tuple((b, chi[b](h)) for b in cgs.agents)
    return h.extend(alpha, step(cgs, h.last, alpha))


def strategy_domain(cgs: Cgs, horizon: int) -> list[History]:
    """Histories from the initial positions with duration below ``horizon``."""
    if horizon <= 0:
        return []
    return sorted(cgs.histories(horizon - 1), key=History.sort_key)


def enum_strategies(cgs: Cgs, horizon: int, agent: str | None = None,
                    budget: int = DEFAULT_BUDGET) -> Iterator[Strategy]:
    """Every decision table over the histories of duration below ``horizon``.

    Tables are total on that domain and share a canonical default (the first
    available action).  With an empty domain the constant strategies are
    produced instead, one per action.
    """
    acts = cgs.moves[agent] if agent is not None else cgs.actions
    domain = strategy_domain(cgs, horizon)
    count = len(acts) ** len(domain) if domain else len(acts)
    if count > budget:
        raise ResourceError(f"strategies of horizon {horizon}", count, budget)
    if not domain:
        for a in acts:
            yield Strategy(frozenset(), a, 0)
        return
    for combo in itertools.product(acts, repeat=len(domain)):
        yield Strategy(frozenset(zip(domain, combo)), acts[0], horizon)
