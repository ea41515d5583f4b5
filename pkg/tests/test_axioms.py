import random

from stratepi import axioms
from stratepi.logic import FALSE, Implies, Know, Not
from stratepi.sampling import random_perspective


def test_all_suites_hold():
    for result in axioms.run_all(samples=60, seed=11, relation_samples=20):
        assert result.ok, result.line() + "\n" + "\n".join(result.failures)


def test_restriction_pairs():
    assert axioms.restriction_pairs(random.Random(4), 40).ok


def test_countermodel():
    assert axioms.countermodel().ok


def test_reports_are_deterministic():
    a = [(r.name, r.samples, r.violations) for r in axioms.run_all(samples=20, seed=5, relation_samples=5)]
    b = [(r.name, r.samples, r.violations) for r in axioms.run_all(samples=20, seed=5, relation_samples=5)]
    assert a == b


def _any_perspective(rng, cgs):
    return random_perspective(rng, cgs.agents, 4, rng.random(), 0.3)


def test_preconditions_matter():
    # the same sampler finds violations once the preconditions are dropped,
    # so passing suites are not vacuous
    rng = random.Random(0)
    pool = axioms.structures()
    five = axioms._validity(axioms.PropertyResult("5"), rng, pool, 300,
                            lambda a, f: Implies(Not(Know(a, f)), Know(a, Not(Know(a, f)))), _any_perspective)
    b = axioms._validity(axioms.PropertyResult("B"), rng, pool, 300,
                         lambda a, f: Implies(f, Know(a, Not(Know(a, Not(f))))), _any_perspective)
    truth = axioms._validity(axioms.PropertyResult("T"), rng, pool, 300,
                             lambda a, f: Implies(Know(a, f), f), _any_perspective)
    assert five.violations > 0 and b.violations > 0 and truth.violations > 0


def test_guard_is_needed_for_truth():
    # an inconsistent state knows false, which the guard excludes
    rng = random.Random(1)
    pool = axioms.structures()
    res = axioms._validity(axioms.PropertyResult("guard"), rng, pool, 300,
                           lambda a, f: Not(Know(a, FALSE)), _any_perspective)
    assert res.violations > 0
