import random

import pytest
from hypothesis import given, settings, strategies as st

from stratepi.errors import ConfigError, ParseError
from stratepi.logic import (
    FALSE,
    TRUE,
    And,
    Common,
    Implies,
    Know,
    Next,
    Not,
    Or,
    Prop,
    desugar,
    kd,
    parse,
    render,
    size,
    xd,
)
from stratepi.sampling import random_formula

p, q, r = Prop("p"), Prop("q"), Prop("r")


class TestParse:
    @pytest.mark.parametrize(
        "text, tree",
        [
            ("p", p),
            ("false", FALSE),
            ("true", TRUE),
            ("!p", Not(p)),
            ("p & q | r", Or(And(p, q), r)),
            ("p | q & r", Or(p, And(q, r))),
            ("p -> q -> r", Implies(p, Implies(q, r))),
            ("p & q & r", And(And(p, q), r)),
            ("K[b] X p", Know("b", Next(p))),
            ("K[b] (X p | X q)", Know("b", Or(Next(p), Next(q)))),
            ("K[b] X p | X q", Or(Know("b", Next(p)), Next(q))),
            ("C[{a,b}] p", Common(frozenset("ab"), p)),
            ("!K[a] false -> (K[a] p -> p)", Implies(Not(Know("a", FALSE)), Implies(Know("a", p), p))),
            ("K[alice] Kp", Know("alice", Prop("Kp"))),
        ],
    )
    def test_examples(self, text, tree):
        assert parse(text) == tree

    @pytest.mark.parametrize(
        "text, line, col",
        [
            ("p &", 1, 4),
            ("p $ q", 1, 3),
            ("K[b X p", 1, 5),
            ("(p", 1, 3),
            ("p\n& ) q", 2, 3),
            ("X", 1, 2),
            ("K", 1, 1),
        ],
    )
    def test_errors_carry_position(self, text, line, col):
        with pytest.raises(ParseError) as err:
            parse(text)
        assert (err.value.line, err.value.column) == (line, col)

    def test_empty_common_group(self):
        with pytest.raises(ConfigError):
            Common(frozenset(), p)


class TestMeasures:
    def test_depths(self):
        f = parse("K[a] X K[b] p & X X q")
        assert kd(f) == 2
        assert xd(f) == 2
        assert size(parse("p & q")) == 3

    def test_kd_undefined_with_common(self):
        with pytest.raises(ConfigError):
            kd(parse("K[a] C[{a,b}] p"))

    def test_desugar_uses_core_connectives(self):
        f = desugar(parse("!p | q & true"))
        text = render(f)
        assert "|" not in text and "&" not in text and "!" not in text and "true" not in text


def test_render_examples():
    assert render(parse("K[b]  X  p")) == "K[b] X p"
    assert render(parse("(p -> q) -> r")) == "(p -> q) -> r"
    assert render(parse("p | (q | r)")) == "p | (q | r)"
    assert render(parse("!(p & q)")) == "!(p & q)"
    assert render(parse("C[{b,a}] p")) == "C[{a,b}] p"


def test_thousand_random_round_trips():
    rng = random.Random(2024)
    for _ in range(1000):
        f = random_formula(rng, "abc", "pqr", max_kd=3, max_xd=2, size=rng.randint(1, 14), common=True)
        assert parse(render(f)) == f


formula_st = st.recursive(
    st.sampled_from([p, q, FALSE, TRUE]),
    lambda sub: st.one_of(
        st.builds(Not, sub),
        st.builds(Next, sub),
        st.builds(Know, st.sampled_from(["a", "b", "bob"]), sub),
        st.builds(Common, st.frozensets(st.sampled_from(["a", "b"]), min_size=1), sub),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub),
    ),
    max_leaves=10,
)


@settings(max_examples=300, deadline=None)
@given(formula_st)
def test_round_trip_property(f):
    assert parse(render(f)) == f
