"""A deliberately naive reference evaluator used to cross-check the checker.

Everything here is recomputed from the raw structure data: histories,
indistinguishability, consistency, informed sets and localized perspectives.
Strategies are total tables over all histories below the horizon, successor
perspectives are *all* finite word sets of the relevant length containing the
localized perspective, and nothing is memoized.  It is only usable on tiny
instances and refuses anything larger.
"""
from __future__ import annotations

import itertools

from .checker import EvalConfig, State, Verdict
from .core import Cgs, History
from .errors import ConfigError
from .logic import And, Bottom, Common, Formula, Implies, Know, Next, Not, Or, Prop, Top, kd, xd

MAX_AGENTS = 3
MAX_POSITIONS = 4
MAX_HORIZON = 2
MAX_KD = 3
MAX_CK_DEPTH = 3
MAX_BRANCHING = 50_000


def _all_words(agents, max_len):
    out = []
    layer = [(x,) for x in agents]
    for n in range(2, max_len + 1):
        layer = [w + (y,) for w in layer for y in agents if y != w[-1]]
        out.extend(layer)
    return out


def _unfold_common(f: Formula, depth: int) -> Formula:
    """Replace every ``C[G] g`` by the conjunction of all ``K`` chains up to ``depth``."""
    if isinstance(f, (Prop, Bottom, Top)):
        return f
    if isinstance(f, Not):
        return Not(_unfold_common(f.body, depth))
    if isinstance(f, Next):
        return Next(_unfold_common(f.body, depth))
    if isinstance(f, Know):
        return Know(f.agent, _unfold_common(f.body, depth))
    if isinstance(f, (Implies, And, Or)):
        return type(f)(_unfold_common(f.left, depth), _unfold_common(f.right, depth))
    body = _unfold_common(f.body, depth)
    conj = None
    for n in range(1, depth + 1):
        for seq in itertools.product(sorted(f.group), repeat=n):
            g = body
            for x in reversed(seq):
                g = Know(x, g)
            conj = g if conj is None else And(conj, g)
    return conj


class _Oracle:
    def __init__(self, cgs: Cgs, horizon: int):
        self.cgs = cgs
        self.horizon = horizon
        self.agents = list(cgs.agents)
        self.pos_block = {
            b: {v: i for i, blk in enumerate(cgs.position_obs[b]) for v in blk} for b in self.agents
        }
        self.act_block = {
            b: {x: i for i, blk in enumerate(cgs.action_obs[b]) for x in blk} for b in self.agents
        }
        self.joints = [
            tuple(zip(self.agents, combo)) for combo in itertools.product(*(cgs.moves[b] for b in self.agents))
        ]
        self.by_duration = [[History.initial(v) for v in cgs.initial]]
        for _ in range(horizon + 1):
            self.by_duration.append(
                [h.extend(al, cgs.transitions[(h.last, al)]) for h in self.by_duration[-1] for al in self.joints]
            )
        self.domain = [h for layer in self.by_duration[:horizon] for h in layer]
        self.tables = {
            b: [dict(zip(self.domain, combo)) for combo in itertools.product(cgs.moves[b], repeat=len(self.domain))]
            for b in self.agents
        }

    def tabulate(self, strategy) -> dict:
        return {h: strategy(h) for h in self.domain}

    def same_hist(self, a, h1, h2) -> bool:
        if len(h1.positions) != len(h2.positions):
            return False
        pb, ab = self.pos_block[a], self.act_block[a]
        for v, w in zip(h1.positions, h2.positions):
            if pb[v] != pb[w]:
                return False
        for j1, j2 in zip(h1.joints, h2.joints):
            for (_, x), (_, y) in zip(j1, j2):
                if ab[x] != ab[y]:
                    return False
        return True

    @staticmethod
    def informed(a, words) -> set:
        return {a} | {w[1] for w in words if len(w) == 2 and w[0] == a}

    @staticmethod
    def localize(a, words) -> set:
        out = set()
        for w in words:
            if w[0] == a:
                if len(w) >= 3:
                    out.add(w[1:])
                out.add(w)
        return out

    def follows(self, h, chi, agents) -> bool:
        for i, al in enumerate(h.joints):
            prefix = History(h.positions[: i + 1], h.joints[:i])
            for b, x in al:
                if b in agents and chi[b][prefix] != x:
                    return False
        return True

    def holds(self, chi, words, h, f) -> bool:
        if isinstance(f, Prop):
            return f.name in self.cgs.labels[h.last]
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Top):
            return True
        if isinstance(f, Not):
            return not self.holds(chi, words, h, f.body)
        if isinstance(f, Implies):
            return (not self.holds(chi, words, h, f.left)) or self.holds(chi, words, h, f.right)
        if isinstance(f, And):
            return self.holds(chi, words, h, f.left) and self.holds(chi, words, h, f.right)
        if isinstance(f, Or):
            return self.holds(chi, words, h, f.left) or self.holds(chi, words, h, f.right)
        if isinstance(f, Next):
            if h.duration >= self.horizon:
                raise ConfigError("oracle horizon too small for this formula")
            al = tuple((b, chi[b][h]) for b in self.agents)
            return self.holds(chi, words, h.extend(al, self.cgs.transitions[(h.last, al)]), f.body)
        if isinstance(f, Know):
            return all(self.holds(*z, f.body) for z in self.successors(chi, words, h, f.agent, kd(f.body) + 2))
        raise TypeError(f"oracle cannot evaluate {f!r}")

    def successors(self, chi, words, h, a, bound):
        mine = self.informed(a, words)
        if not self.follows(h, chi, mine):
            return
        base = {w for w in self.localize(a, words) if len(w) <= bound}
        optional = [w for w in _all_words(self.agents, bound) if w not in base]
        hists = [g for g in self.by_duration[h.duration] if self.same_hist(a, h, g)]
        choices = [[chi[b]] if b in mine else self.tables[b] for b in self.agents]
        for r in range(len(optional) + 1):
            for extra in itertools.combinations(optional, r):
                words2 = frozenset(base) | frozenset(extra)
                mine2 = self.informed(a, words2)
                for combo in itertools.product(*choices):
                    chi2 = dict(zip(self.agents, combo))
                    for g in hists:
                        if self.follows(g, chi2, mine2):
                            yield chi2, words2, g


def _prepare(cgs: Cgs, z: State, f: Formula, cfg: EvalConfig):
    if len(cgs.agents) > MAX_AGENTS or len(cgs.positions) > MAX_POSITIONS:
        raise ConfigError("instance beyond oracle limits (agents or positions)")
    g = _unfold_common(f, min(cfg.ck_depth, MAX_CK_DEPTH))
    horizon = cfg.horizon if cfg.horizon is not None else z.hist.duration + xd(g)
    if horizon > MAX_HORIZON or kd(g) > MAX_KD:
        raise ConfigError("instance beyond oracle limits (horizon or K-depth)")
    if horizon < z.hist.duration + xd(g):
        raise ConfigError("horizon below duration + X-depth")
    oracle = _Oracle(cgs, horizon)
    tables = 1
    for b in cgs.agents:
        tables *= len(oracle.tables[b])
    if tables * 2 ** len(_all_words(cgs.agents, kd(g) + 1)) > MAX_BRANCHING:
        raise ConfigError("instance beyond oracle limits (branching)")
    chi = {b: oracle.tabulate(z.chi[b]) for b in cgs.agents}
    words = frozenset(w for w in _all_words(cgs.agents, kd(g) + 2) if z.persp.member(w))
    return oracle, chi, words, g


def oracle_check(cgs: Cgs, z: State, f: Formula, cfg: EvalConfig = EvalConfig()) -> Verdict:
    """Truth of ``f`` at ``z`` by exhaustive enumeration.

    Common knowledge is unfolded into all ``K`` chains (repetitions included)
    up to ``min(cfg.ck_depth, 3)``; only the truth value is reported.
    """
    oracle, chi, words, g = _prepare(cgs, z, f, cfg)
    return Verdict("true") if oracle.holds(chi, words, z.hist, g) else Verdict("false")


def oracle_successors(cgs: Cgs, z: State, agent: str, body: Formula, cfg: EvalConfig = EvalConfig()) -> int:
    """Number of accessible states for ``agent`` on the bounded carrier of ``body``."""
    oracle, chi, words, g = _prepare(cgs, z, Know(agent, body), cfg)
    return sum(1 for _ in oracle.successors(chi, words, z.hist, agent, kd(body) + 2))
