"""Command-line interface.

Exit codes: 0 success, 1 a verdict or property did not match expectations,
2 malformed input or settings, 3 an enumeration budget was exceeded.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import axioms, modelfile, scenarios
from .checker import DEFAULT_CK_DEPTH, EvalConfig, State, Verdict, check
from .core import DEFAULT_BUDGET
from .errors import InputError, StratEpiError
from .logic import parse, render
from .oracle import oracle_check
from .perspective import render_word
from .sampling import tiny_instance


def state_record(cgs, z: State, bound: int = 4) -> dict:
    strategies = {}
    for b, s in z.chi.strategies.items():
        strategies[b] = {
            "default": s.default,
            "table": [[h.render(), a] for h, a in s.entries()],
        }
    return {
        "history": z.hist.render(),
        "perspective": sorted((render_word(w) for w in z.persp.restrict(bound)), key=lambda w: (len(w), w)),
        "ck": [c.render() for c in sorted(z.persp.ck, key=lambda c: (c.target, sorted(c.group)))],
        "strategies": strategies,
    }


def verdict_record(name, cgs, verdict: Verdict, cfg: EvalConfig, elapsed: float, formula=None, state=None,
                   trace: bool = False) -> dict:
    rec = {
        "query": name,
        "verdict": verdict.render(),
        "value": verdict.value,
        "config": {"horizon": cfg.horizon, "ck_depth": cfg.ck_depth, "budget": cfg.budget},
        "elapsed_ms": round(elapsed * 1000, 3),
    }
    if formula is not None:
        rec["formula"] = render(formula)
    if state is not None:
        rec["state"] = state
    if trace and verdict.chain is not None:
        rec["trace"] = [{"step": label, **state_record(cgs, z)} for label, z in verdict.chain]
    return rec


def print_trace(cgs, verdict: Verdict) -> None:
    for label, z in verdict.chain or ():
        step = "next" if label == "X" else f"K[{label}]"
        print(f"  {step:>6}  {z.describe(cgs)}")


def _config(args, q=None) -> EvalConfig:
    horizon = args.horizon if args.horizon is not None else (q.horizon if q else None)
    ck_depth = args.ck_depth if args.ck_depth is not None else (q.ck_depth if q and q.ck_depth else DEFAULT_CK_DEPTH)
    return EvalConfig(horizon=horizon, ck_depth=ck_depth, budget=args.budget)


def cmd_check(args) -> int:
    s = modelfile.load(args.model)
    jobs = []
    if args.formula is not None:
        if args.state is None:
            raise InputError("--formula needs --state")
        q = scenarios.Query("cli", args.state, parse(args.formula), args.expect)
        jobs.append(q)
    elif args.query:
        jobs = [s.query(name) for name in args.query]
    else:
        jobs = [q for q in s.queries if args.state is None or q.state == args.state]
    status = 0
    records = []
    for q in jobs:
        cfg = _config(args, q)
        trace = args.trace
        t0 = time.perf_counter()
        verdict = check(s.cgs, s.state(q.state), q.formula, cfg, trace=trace)
        elapsed = time.perf_counter() - t0
        ok = s.query_passes(q, verdict)
        if not ok:
            status = 1
        rec = verdict_record(q.name, s.cgs, verdict, cfg, elapsed, q.formula, q.state, trace)
        if q.expected is not None:
            rec["expected"] = q.expected
            rec["pass"] = ok
        records.append(rec)
        if not args.json:
            if len(jobs) == 1 and q.expected is None:
                print(verdict.render())
            else:
                mark = "" if q.expected is None else ("  ok" if ok else f"  MISMATCH (expected {q.expected})")
                print(f"{q.name}: {verdict.render()}{mark}")
            if trace:
                print_trace(s.cgs, verdict)
    if args.json:
        print(json.dumps(records if len(records) != 1 else records[0], sort_keys=True, indent=2))
    return status


def cmd_axioms(args) -> int:
    t0 = time.perf_counter()
    if args.model:
        cgs = modelfile.load(args.model).cgs
        results = axioms.run_for_model(cgs, args.samples, args.seed) + [axioms.countermodel()]
    else:
        results = axioms.run_all(args.samples, args.seed)
    elapsed = time.perf_counter() - t0
    if args.json:
        print(json.dumps({
            "seed": args.seed,
            "samples": args.samples,
            "elapsed_ms": round(elapsed * 1000, 3),
            "results": [
                {"property": r.name, "samples": r.samples, "violations": r.violations, "failures": r.failures}
                for r in results
            ],
        }, sort_keys=True, indent=2))
    else:
        for r in results:
            print(r.line())
            for f in r.failures:
                print(f"    {f}")
        print(f"seed {args.seed}, {elapsed:.1f}s")
    return 0 if all(r.ok for r in results) else 1


def instance_dump(cgs, z, f, cfg) -> str:
    s = scenarios.Scenario("divergence", cgs)
    s.states["Z"] = z
    s.queries.append(scenarios.Query("q", "Z", f, horizon=cfg.horizon, ck_depth=cfg.ck_depth))
    return modelfile.dumps(s)


def run_differential(cases: int, seed: int):
    rng = random.Random(seed)
    passed, divergences = 0, []
    for i in range(cases):
        cgs, z, f, cfg = tiny_instance(rng)
        mine, ref = check(cgs, z, f, cfg), oracle_check(cgs, z, f, cfg)
        if mine.value == ref.value:
            passed += 1
        else:
            divergences.append((i, mine, ref, instance_dump(cgs, z, f, cfg)))
    return passed, divergences


def run_scenarios():
    out = []
    for name in scenarios.BUILDERS:
        s = scenarios.build(name)
        for q in s.queries:
            v = s.run(q)
            out.append((f"{name}/{q.name}", q.expected, v, s.query_passes(q, v)))
    return out


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    status = 0
    regressions = run_scenarios()
    for name, expected, v, ok in regressions:
        if not ok:
            status = 1
        if not args.json:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {v.render()} (expected {expected})")
    passed, divergences = run_differential(args.cases, args.seed)
    if divergences:
        status = 1
    elapsed = time.perf_counter() - t0
    if args.json:
        print(json.dumps({
            "scenarios": [{"query": n, "expected": e, "verdict": v.render(), "pass": ok} for n, e, v, ok in regressions],
            "differential": {"cases": args.cases, "seed": args.seed, "passed": passed,
                             "divergences": [{"case": i, "checker": m.render(), "oracle": r.render(), "instance": d}
                                             for i, m, r, d in divergences]},
            "elapsed_ms": round(elapsed * 1000, 3),
        }, sort_keys=True, indent=2))
    else:
        print(f"{'PASS' if not divergences else 'FAIL'} differential: {passed}/{args.cases} agree with the oracle")
        for i, m, r, dump in divergences:
            print(f"--- case {i}: checker {m.render()}, oracle {r.render()}")
            print(dump)
        print(f"{elapsed:.1f}s")
    return status


def cmd_export(args) -> int:
    text = modelfile.dumps(scenarios.build(args.name))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_list(args) -> int:
    for name in scenarios.BUILDERS:
        s = scenarios.build(name)
        print(f"{name}: {len(s.cgs.positions)} positions, {len(s.queries)} queries")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stratepi", description="Model checker for knowledge of strategies.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate formulas at states of a model file")
    c.add_argument("model")
    c.add_argument("--state", help="state name from the model file")
    c.add_argument("--formula", help='formula text, e.g. "K[b] X p"')
    c.add_argument("--query", action="append", help="run a named query from the file (repeatable)")
    c.add_argument("--expect", help="expected verdict; a mismatch exits with 1")
    c.add_argument("--horizon", type=int)
    c.add_argument("--ck-depth", type=int)
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.add_argument("--trace", action="store_true", help="print the refuting chain of states")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("axioms", help="sample states and check structural properties")
    a.add_argument("model", nargs="?", help="model file (default: the built-in structures)")
    a.add_argument("--samples", type=int, default=200)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_axioms)

    t = sub.add_parser("selftest", help="scenario regressions and the oracle differential")
    t.add_argument("--cases", type=int, default=200)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_selftest)

    s = sub.add_parser("scenarios", help="built-in scenarios")
    ssub = s.add_subparsers(dest="action", required=True)
    e = ssub.add_parser("export", help="write a scenario as a model file")
    e.add_argument("name", choices=sorted(scenarios.BUILDERS))
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export)
    ls = ssub.add_parser("list")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StratEpiError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
