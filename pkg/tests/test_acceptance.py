"""One test per acceptance criterion; each records a PASS/FAIL line."""
import random
import time

from conftest import ACCEPTANCE_LINES
from stratepi import axioms, modelfile, scenarios
from stratepi.checker import EvalConfig, accessible, check
from stratepi.cli import main
from stratepi.logic import has_common, kd, parse, render
from stratepi.oracle import oracle_check
from stratepi.sampling import random_formula, tiny_instance


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_one_shot_choice():
    s = scenarios.g1()
    cases = [
        ("Z1", "K[b] X p", "TRUE"),
        ("Zempty", "K[b] X p", "FALSE"),
        ("Zempty", "K[b] X q", "FALSE"),
        ("Zempty", "K[b] (X p | X q)", "TRUE"),
    ]
    results = []
    for state, f, expected in cases:
        v, dt = timed(lambda: check(s.cgs, s.state(state), parse(f)))
        results.append((v.render() == expected and dt < 1.0, f"{f}@{state}={v.render()} in {dt:.3f}s"))
    report(1, "one-shot choice regressions", all(ok for ok, _ in results), "; ".join(d for _, d in results))


def test_criterion_2_hanabi():
    s = scenarios.g2_hanabi()
    cfg = EvalConfig(horizon=2)
    cases = [
        ("Zknow", "K[b] p", "TRUE"),
        ("Zignorant", "K[b] p", "FALSE"),
        ("Zhigher", "K[a] X K[b] p", "TRUE"),
        ("Zlower", "K[a] X K[b] p", "FALSE"),
    ]
    results = []
    for state, f, expected in cases:
        v, dt = timed(lambda: check(s.cgs, s.state(state), parse(f), cfg))
        results.append((v.render() == expected and dt < 10.0, f"{f}@{state}={v.render()} in {dt:.3f}s"))
    report(2, "Hanabi finesse regressions", all(ok for ok, _ in results), "; ".join(d for _, d in results))


def test_criterion_3_consensus():
    t0 = time.perf_counter()
    s = scenarios.g3_consensus()
    cfg = EvalConfig(ck_depth=6)
    f = parse("C[{a,b}] p")
    details, ok = [], True
    for i in (1, 2, 3):
        for kind in ("Zmissing", "Zdense"):
            z = s.state(f"{kind}{i}")
            v = check(s.cgs, z, f, cfg)
            good = v.kind == "false_witness" and len(v.chain) <= i
            prev = z
            for agent, nxt in v.chain or ():
                good = good and accessible(s.cgs, prev, nxt, agent)
                prev = nxt
            good = good and "p" not in s.cgs.labels[prev.hist.last]
            ok = ok and good
            details.append(f"{kind}{i}: chain {len(v.chain or ())}")
    v = check(s.cgs, s.state("Zck"), f, cfg)
    ok = ok and v.render() == "TRUE@DEPTH 6"
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    report(3, "consensus common knowledge", ok, ", ".join(details) + f"; ck: {v.render()}; total {elapsed:.2f}s")


def test_criterion_4_axioms():
    results, dt = timed(lambda: axioms.run_all(samples=200, seed=0))
    again = axioms.run_all(samples=200, seed=0)
    deterministic = [(r.name, r.samples, r.violations) for r in results] == [
        (r.name, r.samples, r.violations) for r in again
    ]
    ok = all(r.ok for r in results) and deterministic
    detail = "; ".join(f"{r.name} {r.violations}/{r.samples}" for r in results)
    report(4, "axiom suites", ok, f"{detail}; deterministic={deterministic}; {dt:.1f}s")


def test_criterion_5_restriction():
    result = axioms.restriction_pairs(random.Random(0), 100)
    report(5, "perspective restriction", result.ok and result.samples == 100,
           f"{result.samples} pairs, {result.violations} divergences")


def test_criterion_6_oracle_differential():
    rng = random.Random(0)
    agree, in_shape = 0, 0
    for _ in range(200):
        cgs, z, f, cfg = tiny_instance(rng)
        real = {x for agent in cgs.agents for x in cgs.moves[agent] if x != "noop"}
        in_shape += (len(cgs.agents) == 2 and len(cgs.positions) <= 3 and len(real) <= 2
                     and cfg.horizon <= 2 and (has_common(f) or kd(f) <= 2))
        agree += check(cgs, z, f, cfg).value == oracle_check(cgs, z, f, cfg).value
    code, dt = timed(lambda: main(["selftest", "--cases", "200", "--seed", "0"]))
    report(6, "oracle differential", agree == 200 and in_shape == 200 and code == 0 and dt < 300,
           f"{agree}/200 agree, {in_shape}/200 within the tiny limits; selftest exit {code} in {dt:.1f}s")


def test_criterion_7_round_trips():
    rng = random.Random(7)
    failures = 0
    for _ in range(1000):
        f = random_formula(rng, "abc", "pqr", max_kd=3, max_xd=2, size=rng.randint(1, 14), common=True)
        failures += parse(render(f)) != f
    model_failures = 0
    for name in scenarios.BUILDERS:
        s = scenarios.build(name)
        text = modelfile.dumps(s)
        s2 = modelfile.loads(text, s.name)
        same = (s2.cgs, s2.strategies, s2.assignments, s2.perspectives, s2.states, s2.queries) == (
            s.cgs, s.strategies, s.assignments, s.perspectives, s.states, s.queries)
        model_failures += not same or modelfile.dumps(s2) != text
    report(7, "parser round trips", failures == 0 and model_failures == 0,
           f"1000 formulas, {failures} failures; {len(scenarios.BUILDERS)} models, {model_failures} failures")
