"""Random formulas, perspectives, strategies, states and tiny structures.

All generators take a :class:`random.Random` so runs are reproducible.
"""
from __future__ import annotations

import random

from .checker import EvalConfig, State
from .core import Assignment, Cgs, History, Strategy, strategy_domain
from .logic import And, Bottom, Common, Formula, Implies, Know, Next, Not, Or, Prop, Top, xd
from .perspective import CkComponent, InformationPerspective, words


def random_formula(
    rng: random.Random,
    agents,
    props,
    max_kd: int = 2,
    max_xd: int = 1,
    size: int = 6,
    common: bool = False,
) -> Formula:
    """A random formula with bounded K-depth, X-depth and roughly ``size`` nodes."""
    agents, props = sorted(agents), sorted(props)

    def gen(budget, k, x):
        if budget <= 1:
            r = rng.random()
            if r < 0.85:
                return Prop(rng.choice(props))
            return Bottom() if r < 0.93 else Top()
        kinds = ["not", "and", "or", "imp"]
        if k > 0:
            kinds += ["know"] * 3
        if x > 0:
            kinds += ["next"] * 2
        if common and k > 0 and len(agents) > 1:
            kinds.append("common")
        kind = rng.choice(kinds)
        if kind == "not":
            return Not(gen(budget - 1, k, x))
        if kind == "next":
            return Next(gen(budget - 1, k, x - 1))
        if kind == "know":
            return Know(rng.choice(agents), gen(budget - 1, k - 1, x))
        if kind == "common":
            group = frozenset(rng.sample(agents, rng.randint(1, len(agents))))
            return Common(group, gen(budget - 1, 0, x))
        split = rng.randint(1, budget - 2) if budget > 2 else 1
        left, right = gen(split, k, x), gen(max(1, budget - 1 - split), k, x)
        return {"and": And, "or": Or, "imp": Implies}[kind](left, right)

    return gen(size, max_kd, max_xd)


def random_perspective(
    rng: random.Random, agents, max_len: int = 4, density: float = 0.5, ck_prob: float = 0.0
) -> InformationPerspective:
    finite = frozenset(w for w in words(agents, 2, max_len) if rng.random() < density)
    ck = set()
    if rng.random() < ck_prob:
        agents = sorted(agents)
        group = frozenset(rng.sample(agents, rng.randint(1, len(agents))))
        ck.add(CkComponent(rng.choice(agents), group))
    return InformationPerspective(finite, frozenset(ck))


def truthful_closure(p: InformationPerspective) -> InformationPerspective:
    """Smallest suffix-closed perspective containing ``p``."""
    out = set(p.finite)
    for w in p.finite:
        for i in range(1, len(w) - 1):
            out.add(w[i:])
    return InformationPerspective(frozenset(out), p.ck)


def random_strategy(rng: random.Random, cgs: Cgs, agent: str, horizon: int) -> Strategy:
    moves = cgs.moves[agent]
    table = {h: rng.choice(moves) for h in strategy_domain(cgs, horizon)}
    return Strategy.of(table, moves[0], horizon)


def random_assignment(rng: random.Random, cgs: Cgs, horizon: int) -> Assignment:
    return Assignment({b: random_strategy(rng, cgs, b, horizon) for b in cgs.agents})


def random_history(rng: random.Random, cgs: Cgs, duration: int, chi: Assignment | None = None,
                   follow: float = 0.5) -> History:
    """A history from an initial position; with ``chi`` each step obeys it with probability ``follow``."""
    h = History.initial(rng.choice(cgs.initial))
    joints = cgs.joint_actions()
    for _ in range(duration):
        if chi is not None and rng.random() < follow:
            alpha = tuple((b, chi[b](h)) for b in cgs.agents)
        else:
            alpha = rng.choice(joints)
        h = h.extend(alpha, cgs.transitions[(h.last, alpha)])
    return h


def random_state(rng: random.Random, cgs: Cgs, horizon: int, max_duration: int = 1,
                 persp: InformationPerspective | None = None, max_len: int = 4) -> State:
    chi = random_assignment(rng, cgs, horizon)
    if persp is None:
        persp = random_perspective(rng, cgs.agents, max_len, density=rng.random(), ck_prob=0.3)
    hist = random_history(rng, cgs, rng.randint(0, max_duration), chi)
    return State(chi, persp, hist)


def random_tiny_cgs(rng: random.Random) -> Cgs:
    """Two agents, two or three positions, at most two real actions."""
    n = rng.randint(2, 3)
    positions = [f"v{i}" for i in range(1, n + 1)]
    acts = ["alpha", "beta"]
    moves = {}
    for b in ("a", "b"):
        moves[b] = ["noop"] if rng.random() < 0.4 else rng.sample(acts, rng.randint(1, 2))
    if moves["a"] == ["noop"] and moves["b"] == ["noop"]:
        moves["a"] = ["alpha", "beta"]
    joints = [{"a": x, "b": y} for x in moves["a"] for y in moves["b"]]
    transitions = [(v, j, rng.choice(positions)) for v in positions for j in joints]
    labels = {v: [p for p in ("p", "q") if rng.random() < 0.5] for v in positions}

    def partition(items):
        blocks = []
        for x in items:
            if blocks and rng.random() < 0.4:
                rng.choice(blocks).append(x)
            else:
                blocks.append([x])
        return blocks

    used = sorted({x for m in moves.values() for x in m})
    initial = rng.sample(positions, rng.randint(1, 2))
    return Cgs.build(
        agents=["a", "b"],
        actions=used,
        positions=positions,
        transitions=transitions,
        labels=labels,
        position_obs={b: partition(positions) for b in ("a", "b")},
        action_obs={b: partition(used) for b in ("a", "b")},
        moves=moves,
        initial=initial,
    )


def assignment_count(cgs: Cgs, horizon: int) -> int:
    n = len(strategy_domain(cgs, horizon))
    total = 1
    for b in cgs.agents:
        total *= len(cgs.moves[b]) ** n
    return total


def nested_formula(rng: random.Random, agents, props, max_xd: int) -> Formula:
    """``K[x] (!)K[y] (!)g`` with a propositional-temporal ``g``, optionally negated."""
    g = random_formula(rng, agents, props, max_kd=0, max_xd=max_xd, size=rng.randint(1, 4))
    agents = sorted(agents)
    inner = Know(rng.choice(agents), g if rng.random() < 0.5 else Not(g))
    f = Know(rng.choice(agents), inner if rng.random() < 0.5 else Not(inner))
    return Not(f) if rng.random() < 0.3 else f


def tiny_instance(rng: random.Random, max_assignments: int = 64, nested: float = 0.5):
    """A random differential-test instance ``(cgs, state, formula, cfg)``.

    Horizon is ``duration + xd <= 2`` and K-depth at most 2; structures whose
    strategy space would be too large for exhaustive enumeration are resampled.
    With probability ``nested`` the formula nests two knowledge operators,
    which is where the choice of successor perspectives matters most.
    """
    while True:
        cgs = random_tiny_cgs(rng)
        duration = rng.randint(0, 1)
        max_xd = 2 - duration
        if rng.random() < nested:
            f = nested_formula(rng, cgs.agents, ("p", "q"), max_xd)
        else:
            f = random_formula(rng, cgs.agents, ("p", "q"), max_kd=2, max_xd=max_xd,
                               size=rng.randint(3, 7), common=rng.random() < 0.1)
        horizon = duration + xd(f)
        if assignment_count(cgs, max(horizon, 1)) > max_assignments:
            continue
        chi = random_assignment(rng, cgs, max(horizon, 1))
        persp = random_perspective(rng, cgs.agents, 4, density=rng.random(), ck_prob=0.2)
        hist = random_history(rng, cgs, duration, chi)
        cfg = EvalConfig(horizon=horizon, ck_depth=2)
        return cgs, State(chi, persp, hist), f, cfg
