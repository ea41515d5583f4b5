"""Line-oriented text format for structures, strategies, states and queries.

Example::

    # one-shot choice
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
    obs b positions {v2,v3}
    obs b actions {alpha,beta}
    strategy sigma default alpha
      v1 -> beta
    strategy idle default noop
    assignment chi a=sigma b=idle
    perspective informed { words: ba; }
    state Z1 chi informed v1
    query q1 Z1 "K[b] X p" expect "TRUE"

Strategy tables are written as indented ``history -> action`` lines below
their header; histories that are not listed use the default action.  A
``transition v default -> w`` line sends every joint action not listed
explicitly for ``v`` to ``w``.  Queries accept the options ``expect``,
``horizon``, ``ck-depth``, ``max-chain`` and ``note``.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

from .checker import State
from .core import Assignment, Cgs, History, Strategy
from .errors import InputError, ParseError, StratEpiError
from .logic import parse as parse_formula, render as render_formula
from .perspective import CkComponent, InformationPerspective, parse_word, render_word
from .scenarios import Query, Scenario

_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|\{[^}]*\}|\([^)]*\)|->|\}|[^\s{}()"]+')
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_'.-]*$")
QUERY_OPTIONS = ("expect", "horizon", "ck-depth", "max-chain", "note")


def _tokens(text: str, line: int, offset: int = 0) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"cannot read {text[pos:pos + 10]!r}", line, offset + pos + 1)
        out.append((m.group(), offset + pos + 1))
        pos = m.end()
    return out


def _name(tok: tuple[str, int], line: int, what: str) -> str:
    text, col = tok
    if not _NAME.match(text):
        raise ParseError(f"invalid {what} {text!r}", line, col)
    return text


def _string(tok: tuple[str, int], line: int) -> str:
    text, col = tok
    if not text.startswith('"'):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise ParseError(f"bad string literal {text}", line, col) from None


def _braced(tok: tuple[str, int], line: int, what: str) -> list[str]:
    text, col = tok
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"expected a {{...}} {what} set, found {text!r}", line, col)
    items = [s.strip() for s in text[1:-1].split(",")]
    return [s for s in items if s]


def _joint(text: str, line: int, col: int) -> dict[str, str]:
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"expected a joint action like (a:alpha,b:noop), found {text!r}", line, col)
    choice = {}
    for part in text[1:-1].split(","):
        if ":" not in part:
            raise ParseError(f"joint action entry {part.strip()!r} lacks 'agent:action'", line, col)
        b, act = (s.strip() for s in part.split(":", 1))
        if b in choice:
            raise ParseError(f"agent {b!r} appears twice in joint action", line, col)
        choice[b] = act
    return choice


def render_joint(alpha) -> str:
    return "(" + ",".join(f"{b}:{a}" for b, a in alpha) + ")"


def render_history(h: History) -> str:
    return h.render()


class _Loader:
    def __init__(self, text: str, name: str):
        self.name = name
        self.lines = text.splitlines()
        self.agents: list[str] = []
        self.actions: list[str] = []
        self.moves: dict[str, list[str]] = {}
        self.positions: list[str] = []
        self.labels: dict[str, list[str]] = {}
        self.initial: list[str] | None = None
        self.transitions: list = []
        self.defaults: dict[str, str] = {}
        self.pos_obs: dict[str, list] = {}
        self.act_obs: dict[str, list] = {}
        self.strategy_src: dict[str, tuple[int, str, list]] = {}
        self.later: list = []
        self.cgs: Cgs | None = None

    def fail(self, msg, line, col=1):
        raise ParseError(msg, line, col)

    def run(self) -> Scenario:
        current = None
        for i, raw in enumerate(self.lines, start=1):
            text = raw.split("#", 1)[0] if '"' not in raw else self._strip_comment(raw)
            if not text.strip():
                continue
            indented = text[0].isspace()
            if indented:
                if current is None:
                    self.fail("indented line outside a strategy block", i, 1)
                current[2].append((i, text))
                continue
            current = None
            toks = _tokens(text, i)
            keyword = toks[0][0]
            handler = getattr(self, "do_" + keyword, None)
            if handler is None:
                self.fail(f"unknown statement {keyword!r}", i, toks[0][1])
            result = handler(toks[1:], i, text)
            if keyword == "strategy":
                current = result
        return self.finish()

    @staticmethod
    def _strip_comment(raw: str) -> str:
        in_str = False
        esc = False
        for j, c in enumerate(raw):
            if esc:
                esc = False
            elif c == "\\":
                esc = True
            elif c == '"':
                in_str = not in_str
            elif c == "#" and not in_str:
                return raw[:j]
        return raw

    # structure statements
    def do_agents(self, toks, line, _):
        self.agents += [_name(t, line, "agent") for t in toks]

    def do_actions(self, toks, line, _):
        self.actions += [_name(t, line, "action") for t in toks]

    def do_moves(self, toks, line, _):
        if len(toks) < 2:
            self.fail("moves needs an agent and at least one action", line)
        self.moves[_name(toks[0], line, "agent")] = [_name(t, line, "action") for t in toks[1:]]

    def do_position(self, toks, line, _):
        if not toks or len(toks) > 2:
            self.fail("expected 'position NAME [{props}]'", line)
        v = _name(toks[0], line, "position")
        self.positions.append(v)
        if len(toks) == 2:
            self.labels[v] = _braced(toks[1], line, "proposition")

    def do_initial(self, toks, line, _):
        self.initial = (self.initial or []) + [_name(t, line, "position") for t in toks]

    def do_transition(self, toks, line, _):
        if len(toks) != 4 or toks[2][0] != "->":
            self.fail("expected 'transition SRC (a:x,b:y) -> DST' or 'transition SRC default -> DST'", line)
        src = _name(toks[0], line, "position")
        dst = _name(toks[3], line, "position")
        if toks[1][0] == "default":
            if src in self.defaults:
                self.fail(f"second default transition for {src}", line, toks[1][1])
            self.defaults[src] = dst
        else:
            self.transitions.append((src, _joint(toks[1][0], line, toks[1][1]), dst))

    def do_obs(self, toks, line, _):
        if len(toks) < 2 or toks[1][0] not in ("positions", "actions"):
            self.fail("expected 'obs AGENT positions|actions {x,y} ...'", line)
        b = _name(toks[0], line, "agent")
        target = self.pos_obs if toks[1][0] == "positions" else self.act_obs
        target.setdefault(b, []).extend(_braced(t, line, "observation block") for t in toks[2:])

    # named objects
    def do_strategy(self, toks, line, _):
        if len(toks) != 3 or toks[1][0] != "default":
            self.fail("expected 'strategy NAME default ACTION'", line)
        name = _name(toks[0], line, "strategy name")
        if name in self.strategy_src:
            self.fail(f"duplicate strategy {name!r}", line, toks[0][1])
        entry = (line, _name(toks[2], line, "action"), [])
        self.strategy_src[name] = entry
        return entry

    def do_assignment(self, toks, line, text):
        self.later.append(("assignment", toks, line, text))

    def do_perspective(self, toks, line, text):
        self.later.append(("perspective", toks, line, text))

    def do_state(self, toks, line, text):
        self.later.append(("state", toks, line, text))

    def do_query(self, toks, line, text):
        self.later.append(("query", toks, line, text))

    def history(self, items: list[tuple[str, int]], line: int) -> History:
        if not items or len(items) % 2 == 0:
            self.fail("a history alternates positions and joint actions, starting and ending with a position", line,
                      items[0][1] if items else 1)
        positions = [_name(t, line, "position") for t in items[0::2]]
        joints = [self.cgs.coerce_joint(_joint(t[0], line, t[1])) for t in items[1::2]]
        for (_, col), alpha in zip(items[1::2], joints):
            if len(alpha) != len(self.cgs.agents) or {b for b, _ in alpha} != set(self.cgs.agents):
                self.fail("joint action must name every agent exactly once", line, col)
        h = History(tuple(positions), tuple(joints))
        try:
            self.cgs.validate_history(h)
        except StratEpiError as e:
            self.fail(str(e), line, items[0][1])
        return h

    def finish(self) -> Scenario:
        self.cgs = Cgs.build(
            agents=self.agents,
            actions=self.actions,
            positions=self.positions,
            transitions=self.transitions,
            labels=self.labels,
            position_obs=self.pos_obs,
            action_obs=self.act_obs,
            moves=self.moves or None,
            initial=self.initial,
            defaults=self.defaults,
        )
        s = Scenario(self.name, self.cgs)
        for name, (line, default, body) in self.strategy_src.items():
            table = {}
            for ln, text in body:
                toks = _tokens(text, ln)
                if len(toks) < 3 or toks[-2][0] != "->":
                    self.fail("expected 'HISTORY -> ACTION'", ln, toks[0][1] if toks else 1)
                h = self.history(toks[:-2], ln)
                if h in table:
                    self.fail(f"history {h} listed twice", ln, toks[0][1])
                table[h] = _name(toks[-1], ln, "action")
            s.strategies[name] = Strategy.of(table, default)
        for kind, toks, line, text in self.later:
            getattr(self, "bind_" + kind)(s, toks, line, text)
        return s

    def bind_assignment(self, s, toks, line, _):
        if not toks:
            self.fail("assignment needs a name", line)
        name = _name(toks[0], line, "assignment name")
        chosen = {}
        for text, col in toks[1:]:
            if "=" not in text:
                self.fail(f"expected AGENT=STRATEGY, found {text!r}", line, col)
            b, strat = text.split("=", 1)
            if strat not in s.strategies:
                self.fail(f"unknown strategy {strat!r}", line, col)
            chosen[b] = s.strategies[strat]
        chi = Assignment(chosen)
        try:
            chi.validate(self.cgs)
        except StratEpiError as e:
            self.fail(str(e), line, toks[0][1])
        s.assignments[name] = chi

    def bind_perspective(self, s, toks, line, text):
        if len(toks) < 2 or not toks[1][0].startswith("{") or not text.rstrip().endswith("}"):
            self.fail("expected 'perspective NAME { words: ...; ck: x among {..}; }'", line)
        name = _name(toks[0], line, "perspective name")
        start = text.index("{", toks[1][1] - 1)
        body = text[start + 1: text.rindex("}")]
        s.perspectives[name] = parse_perspective(body, line, start + 2)

    def bind_state(self, s, toks, line, _):
        if len(toks) < 4:
            self.fail("expected 'state NAME ASSIGNMENT PERSPECTIVE HISTORY'", line)
        name = _name(toks[0], line, "state name")
        chi_name, persp_name = toks[1][0], toks[2][0]
        if chi_name not in s.assignments:
            self.fail(f"unknown assignment {chi_name!r}", line, toks[1][1])
        if persp_name not in s.perspectives:
            self.fail(f"unknown perspective {persp_name!r}", line, toks[2][1])
        h = self.history(toks[3:], line)
        if h.start not in self.cgs.initial:
            self.fail(f"history must start at an initial position, not {h.start!r}", line, toks[3][1])
        s.states[name] = State(s.assignments[chi_name], s.perspectives[persp_name], h)

    def bind_query(self, s, toks, line, _):
        if len(toks) < 3:
            self.fail('expected \'query NAME STATE "FORMULA" [options]\'', line)
        name = _name(toks[0], line, "query name")
        state = toks[1][0]
        if state not in s.states:
            self.fail(f"unknown state {state!r}", line, toks[1][1])
        try:
            formula = parse_formula(_string(toks[2], line))
        except ParseError as e:
            raise ParseError(f"in formula: {e}", line, toks[2][1]) from None
        opts = {}
        rest = toks[3:]
        if len(rest) % 2:
            self.fail("query options come in 'key value' pairs", line, rest[-1][1])
        for (key, col), val in zip(rest[0::2], rest[1::2]):
            if key not in QUERY_OPTIONS:
                self.fail(f"unknown query option {key!r}", line, col)
            value = _string(val, line)
            if key in ("horizon", "ck-depth", "max-chain"):
                if not value.isdigit():
                    self.fail(f"{key} must be a natural number", line, val[1])
                value = int(value)
            opts["expected" if key == "expect" else key.replace("-", "_")] = value
        s.queries.append(Query(name, state, formula, **opts))


def parse_perspective(body: str, line: int = 0, col: int = 1) -> InformationPerspective:
    """Parse ``words: ba, aba; ck: a among {a,b};`` (the inside of the braces)."""
    finite, ck = set(), set()
    for clause in body.split(";"):
        clause = clause.strip()
        if not clause:
            continue
        if ":" not in clause:
            raise ParseError(f"perspective clause {clause!r} must start with 'words:' or 'ck:'", line, col)
        key, rest = (s.strip() for s in clause.split(":", 1))
        if key == "words":
            for w in filter(None, (x.strip() for x in rest.split(","))):
                try:
                    finite.add(parse_word(w))
                except InputError as e:
                    raise ParseError(str(e), line, col) from None
        elif key == "ck":
            for m in re.finditer(r"(\S+)\s+among\s+\{([^}]*)\}", rest):
                group = frozenset(x.strip() for x in m.group(2).split(",") if x.strip())
                ck.add(CkComponent(m.group(1), group))
            if not ck and rest.strip():
                raise ParseError(f"cannot read ck clause {rest!r}", line, col)
        else:
            raise ParseError(f"unknown perspective clause {key!r}", line, col)
    return InformationPerspective(frozenset(finite), frozenset(ck))


def loads(text: str, name: str = "model") -> Scenario:
    return _Loader(text, name).run()


def load(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return loads(text, path.stem)


# -- export ---------------------------------------------------------------------


def _reverse(named: dict, value, prefix: str):
    for k, v in named.items():
        if v == value:
            return k
    k = prefix
    i = 1
    while k in named:
        i += 1
        k = f"{prefix}{i}"
    named[k] = value
    return k


def dumps(s: Scenario) -> str:
    """Serialize a scenario; :func:`loads` of the result rebuilds it exactly."""
    cgs = s.cgs
    strategies = dict(s.strategies)
    assignments = dict(s.assignments)
    perspectives = dict(s.perspectives)
    out = [f"# scenario {s.name}", f"agents {' '.join(cgs.agents)}", f"actions {' '.join(cgs.actions)}"]
    for b in cgs.agents:
        out.append(f"moves {b} {' '.join(cgs.moves[b])}")
    for v in cgs.positions:
        props = sorted(cgs.labels[v])
        out.append(f"position {v}" + (f" {{{','.join(props)}}}" if props else ""))
    out.append(f"initial {' '.join(cgs.initial)}")
    joints = cgs.joint_actions()
    for v in cgs.positions:
        targets = [cgs.transitions[(v, al)] for al in joints]
        common = max(sorted(set(targets)), key=targets.count)
        if targets.count(common) < 2 and len(targets) > 1:
            common = None
        for al, t in zip(joints, targets):
            if t != common:
                out.append(f"transition {v} {render_joint(al)} -> {t}")
        if common is not None:
            out.append(f"transition {v} default -> {common}")
    for b in cgs.agents:
        blocks = [blk for blk in cgs.position_obs[b] if len(blk) > 1]
        if blocks:
            out.append(f"obs {b} positions " + " ".join("{" + ",".join(sorted(x)) + "}" for x in blocks))
        blocks = [blk for blk in cgs.action_obs[b] if len(blk) > 1]
        if blocks:
            out.append(f"obs {b} actions " + " ".join("{" + ",".join(sorted(x)) + "}" for x in blocks))
    assign_lines = []
    for name, chi in assignments.items():
        parts = [f"{b}={_reverse(strategies, chi[b], f'{name}_{b}')}" for b in chi.agents()]
        assign_lines.append(f"assignment {name} " + " ".join(parts))
    state_lines = []
    for name, z in s.states.items():
        chi_name = _reverse(assignments, z.chi, f"{name}_chi")
        if chi_name not in [line.split()[1] for line in assign_lines]:
            parts = [f"{b}={_reverse(strategies, z.chi[b], f'{chi_name}_{b}')}" for b in z.chi.agents()]
            assign_lines.append(f"assignment {chi_name} " + " ".join(parts))
        persp_name = _reverse(perspectives, z.persp, f"{name}_persp")
        state_lines.append(f"state {name} {chi_name} {persp_name} {render_history(z.hist)}")
    for name, strat in strategies.items():
        out.append(f"strategy {name} default {strat.default}")
        for h, act in strat.entries():
            out.append(f"  {render_history(h)} -> {act}")
    out += assign_lines
    for name, p in perspectives.items():
        out.append(f"perspective {name} {render_perspective(p)}")
    out += state_lines
    for q in s.queries:
        line = f"query {q.name} {q.state} {json.dumps(render_formula(q.formula))}"
        if q.expected is not None:
            line += f" expect {json.dumps(q.expected)}"
        for key, val in (("horizon", q.horizon), ("ck-depth", q.ck_depth), ("max-chain", q.max_chain)):
            if val is not None:
                line += f" {key} {val}"
        if q.note:
            line += f" note {json.dumps(q.note)}"
        out.append(line)
    return "\n".join(out) + "\n"


def render_perspective(p: InformationPerspective) -> str:
    return p.render()


def dump(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps(s))


__all__ = ["load", "loads", "dump", "dumps", "parse_perspective", "render_word"]
