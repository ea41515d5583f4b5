import random
from pathlib import Path

import pytest

from stratepi import modelfile, scenarios
from stratepi.checker import State
from stratepi.errors import ModelError, ParseError
from stratepi.sampling import random_assignment, random_formula, random_perspective, random_tiny_cgs
from stratepi.scenarios import Query, Scenario

MODELS = Path(__file__).resolve().parent.parent / "models"

G1_TEXT = """\
agents a b
actions alpha beta noop
moves a alpha beta
moves b noop
position v1
position v2 {p}
position v3 {q}
initial v1
transition v1 (a:alpha,b:noop) -> v2
transition v1 (a:beta,b:noop) -> v3
transition v2 default -> v2
transition v3 default -> v3
strategy sigma default alpha   # a trailing comment
strategy idle default noop
assignment chi a=sigma b=idle
perspective informed { words: ba; }
state Z1 chi informed v1
query q1 Z1 "K[b] X p" expect "TRUE"
"""


def same(s1: Scenario, s2: Scenario) -> bool:
    return (
        s1.cgs == s2.cgs
        and s1.strategies == s2.strategies
        and s1.assignments == s2.assignments
        and s1.perspectives == s2.perspectives
        and s1.states == s2.states
        and s1.queries == s2.queries
    )


@pytest.mark.parametrize("name", sorted(scenarios.BUILDERS))
def test_golden_files_match_builders(name):
    s = scenarios.build(name)
    path = MODELS / f"{name}.model"
    assert path.read_text() == modelfile.dumps(s)
    assert same(modelfile.load(path), s)


@pytest.mark.parametrize("name", sorted(scenarios.BUILDERS))
def test_loaded_queries_give_the_same_verdicts(name):
    s = modelfile.load(MODELS / f"{name}.model")
    for q in s.queries:
        assert s.query_passes(q, s.run(q))


def test_small_file():
    s = modelfile.loads(G1_TEXT)
    ref = scenarios.g1()
    assert s.cgs == ref.cgs
    assert s.states["Z1"] == ref.state("Z1")
    assert s.run(s.queries[0]).render() == "TRUE"


@pytest.mark.parametrize(
    "edit, message, line",
    [
        (("transition v3 default -> v3\n", ""), "not total", None),
        (("{ words: ba; }", "{ words: aab; }"), "adjacent repetition", 16),
        (("state Z1 chi informed v1", "state Z1 chi nowhere v1"), "unknown perspective", 17),
        (("state Z1 chi informed v1", "state Z1 chi informed v2"), "initial position", 17),
        (('"K[b] X p"', '"K[b] X &"'), "in formula", 18),
        (("moves b noop", "moves b noop\nfrobnicate"), "unknown statement", 5),
        (("assignment chi a=sigma b=idle", "assignment chi a=sigma b=nope"), "unknown strategy", 15),
        (("assignment chi a=sigma b=idle", "assignment chi a=idle b=idle"), "unavailable", 15),
        (("position v2 {p}", "position v2 {p} extra"), "position NAME", 6),
        (("expect \"TRUE\"", "expect \"TRUE\" colour red"), "unknown query option", 18),
    ],
)
def test_load_errors(edit, message, line):
    text = G1_TEXT.replace(*edit)
    with pytest.raises((ParseError, ModelError), match=message) as err:
        modelfile.loads(text)
    if line is not None:
        assert err.value.line == line


def test_parse_error_column():
    with pytest.raises(ParseError) as err:
        modelfile.loads(G1_TEXT.replace("transition v1 (a:alpha,b:noop) -> v2", "transition v1 (a:alpha,b:noop) => v2"))
    assert (err.value.line, err.value.column) == (9, 1)


def test_strategy_tables_and_partitions():
    text = G1_TEXT.replace(
        "strategy sigma default alpha   # a trailing comment",
        "strategy sigma default alpha\n  v1 -> beta\n  v1 (a:beta,b:noop) v3 -> alpha",
    ) + "obs b positions {v2,v3}\nobs b actions {alpha,beta}\n"
    s = modelfile.loads(text)
    assert s.strategies["sigma"].entries()[0][1] == "beta"
    assert s.cgs.same_position("b", "v2", "v3")
    with pytest.raises(ModelError, match="overlap"):
        modelfile.loads(text + "obs b positions {v1,v2}\n")


def test_perspective_clauses():
    p = modelfile.parse_perspective(" words: ba, bob.alice; ck: a among {a,b}, b among {b} ")
    assert ("bob", "alice") in p.finite
    assert len(p.ck) == 2
    with pytest.raises(ParseError):
        modelfile.parse_perspective("colour: red")


def test_random_models_round_trip():
    rng = random.Random(5)
    for i in range(60):
        cgs = random_tiny_cgs(rng)
        s = Scenario(f"m{i}", cgs)
        for j in range(3):
            chi = random_assignment(rng, cgs, 2)
            persp = random_perspective(rng, cgs.agents, 4, rng.random(), 0.5)
            s.states[f"Z{j}"] = State(chi, persp, cgs.history(rng.choice(cgs.initial)))
            f = random_formula(rng, cgs.agents, "pq", 2, 1, rng.randint(1, 8), common=True)
            s.queries.append(Query(f"q{j}", f"Z{j}", f, rng.choice([None, "TRUE", "FALSE(witness)"]),
                                   horizon=rng.choice([None, 2]), note=rng.choice(["", 'has "quotes" # hash'])))
        text = modelfile.dumps(s)
        s2 = modelfile.loads(text, s.name)
        assert s2.cgs == cgs
        assert [s2.states[k] for k in sorted(s2.states)] == [s.states[k] for k in sorted(s.states)]
        assert s2.queries == s.queries
        assert modelfile.dumps(s2) == text
