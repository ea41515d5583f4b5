"""Sampled checks of the logic's structural properties.

Each suite draws random states over the reference structures and counts
violations.  Everything is driven by one seed, so reports are reproducible.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import scenarios
from .checker import EvalConfig, State, a_consistent, accessible, check, successors
from .core import Cgs, consistent
from .logic import FALSE, Formula, Implies, Know, Not, kd, parse, render, xd
from .perspective import InformationPerspective, fully_informed, words
from .sampling import random_formula, random_perspective, random_state, truthful_closure


@dataclass
class PropertyResult:
    name: str
    samples: int = 0
    violations: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.samples > 0

    def record(self, good: bool, detail: str) -> None:
        self.samples += 1
        if not good:
            self.violations += 1
            if len(self.failures) < 5:
                self.failures.append(detail)

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.samples} samples, {self.violations} violations"


def structures() -> list[tuple[str, Cgs]]:
    return [
        ("g1", scenarios.g1().cgs),
        ("g2", scenarios.g2_hanabi().cgs),
        ("g3", scenarios.g3_consensus(0).cgs),
    ]


def _props(cgs: Cgs) -> list[str]:
    return sorted(set().union(*cgs.labels.values()))


def _sample(rng, pool, persp_fn=None, max_kd=1, max_xd=1, size=4):
    name, cgs = rng.choice(pool)
    f = random_formula(rng, cgs.agents, _props(cgs), max_kd=max_kd, max_xd=max_xd, size=size)
    a = rng.choice(cgs.agents)
    persp = persp_fn(rng, cgs) if persp_fn else None
    z = random_state(rng, cgs, horizon=2, max_duration=1, persp=persp)
    return name, cgs, z, a, f


def _validity(result, rng, pool, n, build, persp_fn=None, **gen):
    for _ in range(n):
        name, cgs, z, a, f = _sample(rng, pool, persp_fn, **gen)
        g = build(a, f)
        v = check(cgs, z, g, EvalConfig())
        result.record(v.value, f"{name}: {render(g)} at {z.describe(cgs)}")
    return result


def positive_introspection(rng, pool, n) -> PropertyResult:
    return _validity(PropertyResult("positive introspection"), rng, pool, n,
                     lambda a, f: Implies(Know(a, f), Know(a, Know(a, f))))


def truth_axiom(rng, pool, n) -> PropertyResult:
    def truthful(rng, cgs):
        return truthful_closure(random_perspective(rng, cgs.agents, 4, density=rng.random(), ck_prob=0.3))

    return _validity(PropertyResult("conditional truth on truthful perspectives"), rng, pool, n,
                     lambda a, f: Implies(Not(Know(a, FALSE)), Implies(Know(a, f), f)), truthful)


def _full(rng, cgs):
    return fully_informed(cgs.agents)


def axiom_b(rng, pool, n) -> PropertyResult:
    return _validity(PropertyResult("axiom B when fully informed"), rng, pool, n,
                     lambda a, f: Implies(f, Know(a, Not(Know(a, Not(f))))), _full)


def negative_introspection(rng, pool, n) -> PropertyResult:
    return _validity(PropertyResult("negative introspection when fully informed"), rng, pool, n,
                     lambda a, f: Implies(Not(Know(a, f)), Know(a, Not(Know(a, f)))), _full)


def countermodel() -> PropertyResult:
    """The uninformed g1 state refutes negative introspection."""
    result = PropertyResult("negative introspection countermodel")
    s = scenarios.g1()
    z = s.state("Zempty")
    f = parse("!K[b] X p & !K[b] !K[b] X p")
    result.record(check(s.cgs, z, f).value, f"{render(f)} at {z.describe(s.cgs)}")
    return result


def _small_structures():
    return [("g1", scenarios.g1().cgs), ("g3", scenarios.g3_consensus(0).cgs)]


def _relation_samples(rng, n, persp_fn=None):
    """Triples ``Z, Z', Z''`` with ``Z'`` and ``Z''`` drawn from explicit successor sets."""
    pool = _small_structures()
    body = parse("X p")
    cfg = EvalConfig(horizon=2)
    out = []
    while len(out) < n:
        name, cgs = rng.choice(pool)
        persp = persp_fn(rng, cgs) if persp_fn else random_perspective(rng, cgs.agents, 3, rng.random(), 0.3)
        z = random_state(rng, cgs, horizon=2, max_duration=1, persp=persp)
        a = rng.choice(cgs.agents)
        first = successors(cgs, z, a, body, cfg)
        if not first:
            continue
        z1 = rng.choice(first)
        second = successors(cgs, z1, a, body, cfg)
        z2 = rng.choice(second) if second else None
        out.append((name, cgs, a, z, z1, z2))
    return out


def transitivity(rng, n) -> PropertyResult:
    result = PropertyResult("transitivity of accessibility")
    for name, cgs, a, z, z1, z2 in _relation_samples(rng, n):
        if z2 is None:
            continue
        good = accessible(cgs, z, z1, a) and accessible(cgs, z1, z2, a) and accessible(cgs, z, z2, a)
        result.record(good, f"{name} agent {a}: {z.describe(cgs)} / {z2.describe(cgs)}")
    return result


def access_consistency(rng, n) -> PropertyResult:
    result = PropertyResult("successor histories follow the informed strategies")
    for name, cgs, a, z, z1, _ in _relation_samples(rng, n):
        good = consistent(z1.hist, z.chi, z.persp.informed_set(a)) and a_consistent(z, a)
        result.record(good, f"{name} agent {a}: {z.describe(cgs)} -> {z1.describe(cgs)}")
    return result


def symmetry(rng, n) -> PropertyResult:
    result = PropertyResult("symmetry of accessibility when fully informed")
    for name, cgs, a, z, z1, _ in _relation_samples(rng, n, _full):
        result.record(accessible(cgs, z1, z, a), f"{name} agent {a}: {z.describe(cgs)} -> {z1.describe(cgs)}")
    return result


def restriction_pairs(rng, n, pool=None) -> PropertyResult:
    """Perspectives that agree on words up to ``kd + 2`` give the same verdict."""
    result = PropertyResult("perspective restriction")
    pool = pool or structures()
    for _ in range(n):
        name, cgs = rng.choice(pool)
        f = random_formula(rng, cgs.agents, _props(cgs), max_kd=2, max_xd=1, size=rng.randint(3, 6))
        bound = kd(f) + 2
        p1 = random_perspective(rng, cgs.agents, bound + 1, density=rng.random(), ck_prob=0.3)
        shared = p1.restrict(bound)
        longer = [w for w in words(cgs.agents, bound + 1, bound + 2) if rng.random() < 0.5]
        p2 = InformationPerspective(shared | frozenset(longer))
        z = random_state(rng, cgs, horizon=2, max_duration=1, persp=p1)
        z2 = State(z.chi, p2, z.hist)
        v1, v2 = check(cgs, z, f), check(cgs, z2, f)
        result.record(v1.value == v2.value, f"{name}: {render(f)} {p1} vs {p2}: {v1} / {v2}")
    return result


def run_all(samples: int = 200, seed: int = 0, relation_samples: int | None = None) -> list[PropertyResult]:
    rng = random.Random(seed)
    pool = structures()
    rel = relation_samples if relation_samples is not None else max(20, samples // 4)
    return [
        positive_introspection(rng, pool, samples),
        truth_axiom(rng, pool, samples),
        axiom_b(rng, pool, samples),
        negative_introspection(rng, pool, samples),
        countermodel(),
        transitivity(rng, rel),
        access_consistency(rng, rel),
        symmetry(rng, rel),
    ]


def run_for_model(cgs: Cgs, samples: int, seed: int) -> list[PropertyResult]:
    """Validity suites over a single loaded structure."""
    rng = random.Random(seed)
    pool = [("model", cgs)]
    return [
        positive_introspection(rng, pool, samples),
        truth_axiom(rng, pool, samples),
        axiom_b(rng, pool, samples),
        negative_introspection(rng, pool, samples),
    ]
