import pytest
from hypothesis import given, strategies as st

from stratepi import scenarios
from stratepi.checker import accessible
from stratepi.errors import InputError
from stratepi.logic import Know, Prop, kd, parse

ALL = [(name, q.name) for name in scenarios.BUILDERS for q in scenarios.build(name).queries]


@pytest.mark.parametrize("name, query", ALL)
def test_query_verdicts(name, query):
    s = scenarios.build(name)
    q = s.query(query)
    v = s.run(q, trace=True)
    assert s.query_passes(q, v), f"{name}/{query}: got {v.render()}, expected {q.expected}"


def test_g1_structure():
    cgs = scenarios.g1().cgs
    assert cgs.positions == ("v1", "v2", "v3")
    assert cgs.labels["v2"] == {"p"} and cgs.labels["v3"] == {"q"}
    assert not cgs.same_position("b", "v2", "v3")
    assert not cgs.same_action("b", "alpha", "beta")


def test_hanabi_observations():
    cgs = scenarios.g2_hanabi().cgs
    assert cgs.same_position("b", "v1", "v4")
    assert cgs.same_position("b", "v3", "v6")
    assert not cgs.same_position("b", "v2", "v5")
    assert not any(cgs.same_position("a", x, y) for x in cgs.positions for y in cgs.positions if x != y)
    acts = ["alpha", "beta", "gamma"]
    assert not any(cgs.same_action("b", x, y) for x in acts for y in acts if x != y)
    assert cgs.moves["b"] == ("noop",) and cgs.moves["c"] == ("noop",)


def test_consensus_observations():
    cgs = scenarios.g3_consensus(0).cgs
    assert cgs.same_position("b", "v2", "v3") and cgs.same_action("b", "alpha", "beta")


class TestKChain:
    def test_examples(self):
        p = Prop("p")
        assert scenarios.k_chain("ba", p) == Know("b", p)
        assert scenarios.k_chain("aba", p) == parse("K[a] K[b] p")

    def test_short_word_rejected(self):
        with pytest.raises(InputError):
            scenarios.k_chain(("a",), Prop("p"))

    @given(st.integers(1, 8))
    def test_depth(self, n):
        w = scenarios.alternating_word(n)
        assert len(w) == n + 1
        assert kd(scenarios.k_chain(w, Prop("p"))) == len(w) - 1

    def test_alternating_words(self):
        assert [scenarios.alternating_word(i) for i in (1, 2, 3)] == [tuple("ba"), tuple("aba"), tuple("baba")]


@pytest.mark.parametrize("kind", ["Zmissing", "Zdense"])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_consensus_witness_follows_accessibility(kind, i):
    s = scenarios.g3_consensus()
    z = s.state(f"{kind}{i}")
    v = s.run(s.query(f"common_{'missing' if kind == 'Zmissing' else 'dense'}{i}"))
    assert len(v.chain) <= i
    prev = z
    for agent, nxt in v.chain:
        assert accessible(s.cgs, prev, nxt, agent)
        prev = nxt
    assert "p" not in s.cgs.labels[prev.hist.last]


def test_unknown_names():
    with pytest.raises(InputError):
        scenarios.build("nope")
    with pytest.raises(InputError):
        scenarios.g1().state("nope")
