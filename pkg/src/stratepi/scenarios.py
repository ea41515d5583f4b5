"""Builders for the three reference structures and their named ingredients.

``g1`` is a one-shot choice between two outcomes, ``g2_hanabi`` the finesse
situation of the card game Hanabi, ``g3_consensus`` the binary consensus
setting.  Each builder returns a :class:`Scenario` bundling the structure with
named strategies, assignments, perspectives, states and regression queries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .checker import EvalConfig, State, Verdict, check
from .core import Assignment, Cgs, History, Strategy
from .errors import InputError
from .logic import Formula, Know, parse
from .perspective import EMPTY, InformationPerspective, Word, fully_informed, parse_word, words


@dataclass(frozen=True)
class Query:
    name: str
    state: str
    formula: Formula
    expected: str | None = None
    horizon: int | None = None
    ck_depth: int | None = None
    max_chain: int | None = None
    note: str = ""

    def config(self, base: EvalConfig = EvalConfig()) -> EvalConfig:
        return EvalConfig(
            horizon=self.horizon if self.horizon is not None else base.horizon,
            ck_depth=self.ck_depth if self.ck_depth is not None else base.ck_depth,
            budget=base.budget,
        )


@dataclass
class Scenario:
    name: str
    cgs: Cgs
    strategies: dict[str, Strategy] = field(default_factory=dict)
    assignments: dict[str, Assignment] = field(default_factory=dict)
    perspectives: dict[str, InformationPerspective] = field(default_factory=dict)
    states: dict[str, State] = field(default_factory=dict)
    queries: list[Query] = field(default_factory=list)

    @property
    def initial(self) -> tuple[str, ...]:
        return self.cgs.initial

    def state(self, name: str) -> State:
        try:
            return self.states[name]
        except KeyError:
            raise InputError(f"unknown state {name!r} (known: {', '.join(self.states)})") from None

    def query(self, name: str) -> Query:
        for q in self.queries:
            if q.name == name:
                return q
        raise InputError(f"unknown query {name!r}")

    def add_state(self, name: str, chi: str, persp: str, hist: History) -> State:
        z = State(self.assignments[chi], self.perspectives[persp], hist)
        self.states[name] = z
        return z

    def add_query(self, name, state, formula, expected=None, note="", **opts) -> Query:
        if isinstance(formula, str):
            formula = parse(formula)
        q = Query(name, state, formula, expected, note=note, **opts)
        self.queries.append(q)
        return q

    def run(self, q: Query, base: EvalConfig = EvalConfig(), trace: bool = False) -> Verdict:
        return check(self.cgs, self.state(q.state), q.formula, q.config(base), trace=trace)

    def query_passes(self, q: Query, verdict: Verdict) -> bool:
        if q.expected is None:
            return True
        if verdict.render() != q.expected:
            return False
        if q.max_chain is not None and verdict.chain is not None:
            return len(verdict.chain) <= q.max_chain
        return True


def k_chain(w: Word | str, body: Formula) -> Formula:
    """``K[x_n] ... K[x_2] body`` for ``w = x_n ... x_2 x_1``; the last symbol is dropped."""
    if isinstance(w, str):
        w = parse_word(w)
    if len(w) < 2:
        raise InputError("k_chain needs a word of length at least 2")
    f = body
    for x in reversed(w[:-1]):
        f = Know(x, f)
    return f


def alternating_word(n: int, last: str = "a", other: str = "b") -> Word:
    """``ba``, ``aba``, ``baba``, ... of length ``n + 1``."""
    w = [last]
    for _ in range(n):
        w.insert(0, other if w[0] == last else last)
    return tuple(w)


def _two_choice_structure(b_blind: bool) -> Cgs:
    positions = ["v1", "v2", "v3"]
    return Cgs.build(
        agents=["a", "b"],
        actions=["alpha", "beta", "noop"],
        positions=positions,
        transitions=[
            ("v1", {"a": "alpha", "b": "noop"}, "v2"),
            ("v1", {"a": "beta", "b": "noop"}, "v3"),
        ],
        labels={"v2": ["p"], "v3": ["q"]},
        position_obs={"b": [["v2", "v3"]]} if b_blind else None,
        action_obs={"b": [["alpha", "beta"]]} if b_blind else None,
        moves={"a": ["alpha", "beta"], "b": ["noop"]},
        initial=["v1"],
        defaults={"v2": "v2", "v3": "v3"},
    )


def _two_choice_ingredients(s: Scenario) -> None:
    s.strategies.update(
        sigma_alpha=Strategy.constant("alpha"),
        sigma_beta=Strategy.constant("beta"),
        idle=Strategy.constant("noop"),
    )
    s.assignments.update(
        chi_alpha=Assignment({"a": s.strategies["sigma_alpha"], "b": s.strategies["idle"]}),
        chi_beta=Assignment({"a": s.strategies["sigma_beta"], "b": s.strategies["idle"]}),
    )


def g1() -> Scenario:
    """Agent a picks alpha (towards p) or beta (towards q); b watches."""
    s = Scenario("g1", _two_choice_structure(b_blind=False))
    _two_choice_ingredients(s)
    s.perspectives.update(empty=EMPTY, b_knows_a=InformationPerspective.of("ba"))
    v1 = History.initial("v1")
    s.add_state("Z1", "chi_alpha", "b_knows_a", v1)
    s.add_state("Zempty", "chi_alpha", "empty", v1)
    s.add_state("Zbeta", "chi_beta", "empty", v1)
    s.add_query("informed", "Z1", "K[b] X p", "TRUE", note="b knows a plays alpha")
    s.add_query("uninformed", "Zempty", "K[b] X p", "FALSE", note="b must allow for beta")
    s.add_query("uninformed_q", "Zempty", "K[b] X q", "FALSE", note="b must allow for alpha")
    s.add_query("disjunction", "Zempty", "K[b] (X p | X q)", "TRUE", note="every choice leads to p or q")
    s.add_query(
        "countermodel", "Zempty", "!K[b] X p & !K[b] !K[b] X p", "TRUE",
        note="negative introspection fails without information",
    )
    return s


def g1_full() -> Scenario:
    """The g1 structure with every strategy common knowledge."""
    s = Scenario("g1_full", _two_choice_structure(b_blind=False))
    _two_choice_ingredients(s)
    s.perspectives["full"] = fully_informed(s.cgs.agents)
    v1 = History.initial("v1")
    s.add_state("Zfull", "chi_alpha", "full", v1)
    s.add_query("informed", "Zfull", "K[b] X p", "TRUE", note="b is informed about a")
    s.add_query("axiom5", "Zfull", "!K[b] X q -> K[b] !K[b] X q", "TRUE", note="negative introspection when fully informed")
    s.add_query("axiomB", "Zfull", "X p -> K[b] !K[b] !X p", "TRUE", note="symmetric accessibility when fully informed")
    return s


def g2_hanabi() -> Scenario:
    """Finesse: a hints c (beta) exactly when b holds a card 1, else tells b (gamma)."""
    positions = [f"v{i}" for i in range(1, 7)]
    cgs = Cgs.build(
        agents=["a", "b", "c"],
        actions=["alpha", "beta", "gamma", "noop"],
        positions=positions,
        transitions=[
            ("v1", {"a": "alpha", "b": "noop", "c": "noop"}, "v2"),
            ("v1", {"a": "beta", "b": "noop", "c": "noop"}, "v3"),
            ("v4", {"a": "gamma", "b": "noop", "c": "noop"}, "v5"),
            ("v4", {"a": "beta", "b": "noop", "c": "noop"}, "v6"),
        ],
        labels={"v1": ["p"], "v2": ["p"], "v3": ["p"]},
        # unlisted moves (gamma at v1, alpha at v4) are not part of the
        # depicted game; they leave the position unchanged
        defaults={v: v for v in positions},
        position_obs={"b": [["v1", "v4"], ["v3", "v6"]]},
        moves={"a": ["alpha", "beta", "gamma"], "b": ["noop"], "c": ["noop"]},
        initial=["v1", "v4"],
    )
    s = Scenario("g2_hanabi", cgs)
    v1, v4 = History.initial("v1"), History.initial("v4")
    s.strategies.update(
        sigma=Strategy.of({v1: "beta", v4: "gamma"}, "alpha"),
        idle=Strategy.constant("noop"),
    )
    idle = s.strategies["idle"]
    s.assignments["chi"] = Assignment({"a": s.strategies["sigma"], "b": idle, "c": idle})
    s.perspectives.update(
        b_knows_a=InformationPerspective.of("ba"),
        b_ignorant=InformationPerspective.of("ca"),
        a_knows_b_knows=InformationPerspective.of("aba"),
        only_b_knows=InformationPerspective.of("ba", "ca"),
    )
    hinted = cgs.history("v1", "beta", "v3")
    s.add_state("Zknow", "chi", "b_knows_a", hinted)
    s.add_state("Zignorant", "chi", "b_ignorant", hinted)
    s.add_state("Zhigher", "chi", "a_knows_b_knows", v1)
    s.add_state("Zlower", "chi", "only_b_knows", v1)
    s.add_query("finesse", "Zknow", "K[b] p", "TRUE", horizon=2, note="b reads the hint to c as a signal")
    s.add_query("no_finesse", "Zignorant", "K[b] p", "FALSE", horizon=2, note="without a's strategy v4 beta v6 is possible")
    s.add_query("higher_order", "Zhigher", "K[a] X K[b] p", "TRUE", horizon=2, note="a knows b will read the hint")
    s.add_query("first_order_only", "Zlower", "K[a] X K[b] p", "FALSE", horizon=2, note="a cannot rule out an ignorant b")
    return s


def g3_consensus(max_missing: int = 3) -> Scenario:
    """Agent a outputs min (alpha, towards p) or max (beta, towards q); b sees neither."""
    s = Scenario("g3_consensus", _two_choice_structure(b_blind=True))
    _two_choice_ingredients(s)
    s.assignments["chi"] = s.assignments.pop("chi_alpha")
    s.assignments["chi_prime"] = s.assignments.pop("chi_beta")
    rho = s.cgs.history("v1", "alpha", "v2")
    s.perspectives["ck"] = InformationPerspective.of(ck=[("a", ("a", "b"))])
    s.add_state("Zck", "chi", "ck", rho)
    s.add_query("common", "Zck", "C[{a,b}] p", "TRUE@DEPTH 6", ck_depth=6, note="a's strategy is common knowledge")
    for i in range(1, max_missing + 1):
        missing = alternating_word(i)
        # every shorter word of the chain is present, the i-th is absent
        prefix = InformationPerspective(frozenset(alternating_word(j) for j in range(1, i)))
        dense = InformationPerspective(frozenset(w for w in words("ab", 2, 5) if w != missing))
        s.perspectives[f"missing{i}"] = prefix
        s.perspectives[f"dense_missing{i}"] = dense
        s.add_state(f"Zmissing{i}", "chi", f"missing{i}", rho)
        s.add_state(f"Zdense{i}", "chi", f"dense_missing{i}", rho)
        note = f"word of length {i + 1} missing from the chain"
        s.add_query(f"chain{i}", f"Zmissing{i}", k_chain(missing, parse("p")), "FALSE", note=note)
        s.add_query(f"common_missing{i}", f"Zmissing{i}", "C[{a,b}] p", "FALSE(witness)",
                    ck_depth=6, max_chain=i, note=note)
        s.add_query(f"common_dense{i}", f"Zdense{i}", "C[{a,b}] p", "FALSE(witness)",
                    ck_depth=6, max_chain=i, note=note + " from an otherwise rich perspective")
    return s


BUILDERS = {
    "g1": g1,
    "g1_full": g1_full,
    "g2": g2_hanabi,
    "g3": g3_consensus,
}


def build(name: str) -> Scenario:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise InputError(f"unknown scenario {name!r} (known: {', '.join(BUILDERS)})") from None
