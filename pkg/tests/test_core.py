import pytest

from stratepi import scenarios
from stratepi.core import (
    Assignment,
    Cgs,
    History,
    Strategy,
    consistent,
    continue_one_step,
    enum_indist,
    enum_strategies,
    indist_hist,
    joint,
    strategy_domain,
)
from stratepi.errors import ModelError, ResourceError


def small(**over):
    kw = dict(
        agents=["a", "b"],
        actions=["x", "y"],
        positions=["u", "w"],
        transitions=[],
        moves={"a": ["x", "y"], "b": ["x"]},
        defaults={"u": "w", "w": "w"},
    )
    kw.update(over)
    return Cgs.build(**kw)


class TestBuild:
    def test_defaults_make_total(self):
        cgs = small()
        assert len(cgs.transitions) == 4
        assert cgs.initial == ("u", "w")

    def test_missing_transition_rejected(self):
        with pytest.raises(ModelError, match="not total"):
            small(defaults={"w": "w"}, transitions=[("u", {"a": "x", "b": "x"}, "w")])

    def test_overlapping_partition_rejected(self):
        with pytest.raises(ModelError, match="overlap"):
            small(position_obs={"a": [["u", "w"], ["u"]]})

    def test_unknown_partition_element(self):
        with pytest.raises(ModelError, match="unknown"):
            small(action_obs={"a": [["x", "z"]]})

    def test_conflicting_transitions(self):
        with pytest.raises(ModelError, match="conflicting"):
            small(transitions=[("u", {"a": "x", "b": "x"}, "w"), ("u", {"a": "x", "b": "x"}, "u")])

    def test_unavailable_move(self):
        with pytest.raises(ModelError, match="unavailable"):
            small(transitions=[("u", {"a": "x", "b": "y"}, "w")])

    def test_unknown_label_position(self):
        with pytest.raises(ModelError):
            small(labels={"nowhere": ["p"]})


class TestHistories:
    def test_history_render_and_prefix(self):
        cgs = scenarios.g1().cgs
        h = cgs.history("v1", "alpha", "v2", "alpha", "v2")
        assert h.duration == 2
        assert h.render() == "v1 (a:alpha,b:noop) v2 (a:alpha,b:noop) v2"
        assert h.prefix(1) == cgs.history("v1", "alpha", "v2")
        assert h.prefix(0) == History.initial("v1")

    def test_invalid_history_rejected(self):
        cgs = scenarios.g1().cgs
        with pytest.raises(ModelError):
            cgs.history("v1", "alpha", "v3")

    def test_different_durations_are_distinguishable(self):
        cgs = scenarios.g1().cgs
        assert not indist_hist(cgs, "b", History.initial("v1"), cgs.history("v1", "alpha", "v2"))

    def test_consensus_histories_indistinguishable_for_b(self):
        cgs = scenarios.g3_consensus(0).cgs
        rho = cgs.history("v1", "alpha", "v2")
        rho2 = cgs.history("v1", "beta", "v3")
        assert indist_hist(cgs, "b", rho, rho2)
        assert not indist_hist(cgs, "a", rho, rho2)
        assert enum_indist(cgs, "b", rho) == sorted([rho, rho2], key=History.sort_key)

    def test_hanabi_indistinguishable_histories(self):
        cgs = scenarios.g2_hanabi().cgs
        rho = cgs.history("v1", "beta", "v3")
        others = enum_indist(cgs, "b", rho)
        assert others == [rho, cgs.history("v4", "beta", "v6")]
        assert enum_indist(cgs, "a", rho) == [rho]


class TestStrategies:
    def test_default_entries_are_dropped(self):
        v1 = History.initial("v1")
        assert Strategy.of({v1: "alpha"}, "alpha") == Strategy.constant("alpha")

    def test_lookup_and_horizon(self):
        v1 = History.initial("v1")
        s = Strategy.of({v1: "beta"}, "alpha")
        assert s(v1) == "beta"
        assert s.horizon == 1
        assert s(History.initial("v2")) == "alpha"

    def test_enumeration_counts(self):
        cgs = scenarios.g1().cgs
        assert len(strategy_domain(cgs, 1)) == 1
        assert len(strategy_domain(cgs, 2)) == 3
        assert len(list(enum_strategies(cgs, 1, "a"))) == 2
        assert len(list(enum_strategies(cgs, 2, "a"))) == 8
        assert len(set(enum_strategies(cgs, 2, "a"))) == 8
        assert len(list(enum_strategies(cgs, 0, "a"))) == 2

    def test_enumeration_budget(self):
        cgs = scenarios.g1().cgs
        with pytest.raises(ResourceError):
            list(enum_strategies(cgs, 3, "a", budget=10))

    def test_assignment_validation(self):
        cgs = scenarios.g1().cgs
        with pytest.raises(ModelError):
            Assignment({"a": Strategy.constant("noop"), "b": Strategy.constant("noop")}).validate(cgs)
        with pytest.raises(ModelError):
            Assignment({"a": Strategy.constant("alpha")}).validate(cgs)


def test_consistency_and_continuation():
    s = scenarios.g1()
    chi = s.assignments["chi_alpha"]
    h = continue_one_step(s.cgs, chi, History.initial("v1"))
    assert h == s.cgs.history("v1", "alpha", "v2")
    assert consistent(h, chi, ["a", "b"])
    assert not consistent(s.cgs.history("v1", "beta", "v3"), chi, ["a"])
    assert consistent(s.cgs.history("v1", "beta", "v3"), chi, ["b"])


def test_joint_is_sorted():
    assert joint({"b": "y", "a": "x"}) == (("a", "x"), ("b", "y"))
