"""Text format for labels, graphs, productions, policy rules and scenarios.

Example::

    labels { f/3; am/2; sigma/1; }
    graph {
      node g, l, l1, s;
      edge AM: am(g, l1);
      edge F: f(g, l, s);
      edge S: sigma(s);
    }
    use start;
    use am_emit(start_sigma; 0, 1, new) as emit_start;
    production go for f(g, l, s) {
      new g2, l2;
      on 0: go(g2, l2);
      rhs { edge f(g2, l2, s); node g, l; }
    }
    rule { when throughput_low if count(f) >= 1 then rep_share(target f#0; 0, new L8); }
    scenario { inject throughput_low; apply 0; assert count(f) == 2; }

Outputs carry a ``!`` after the action name; ``rep@store`` spells the
store duplication signal.  ``//`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from . import gcm
from .hypergraph import ArityMismatch, Edge, Hypergraph, Label, Node
from .manager import (
    COMPARATORS,
    Always,
    And,
    ByName,
    ByOrdinal,
    Count,
    Event,
    Exists,
    Fresh,
    Guard,
    Not,
    Or,
    PolicyRule,
)
from .production import Action, Condition, Diagnostic, Polarity, Production, Rhs, validate, validate_all


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class DslError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


# -- scenario steps -------------------------------------------------------


@dataclass(frozen=True)
class Inject:
    event: Event


@dataclass(frozen=True)
class ApplyStep:
    index: int


@dataclass(frozen=True)
class RunSteps:
    limit: int | None = None


@dataclass(frozen=True)
class AssertGuard:
    guard: Guard


@dataclass(frozen=True)
class AssertIso:
    graph: Hypergraph


ScenarioStep = Union[Inject, ApplyStep, RunSteps, AssertGuard, AssertIso]


@dataclass(frozen=True)
class SpecFile:
    labels: tuple[Label, ...] = ()
    graph: Hypergraph = field(default_factory=Hypergraph)
    productions: tuple[Production, ...] = ()
    rules: tuple[PolicyRule, ...] = ()
    scenario: tuple[ScenarioStep, ...] = ()

    def with_graph(self, graph: Hypergraph) -> "SpecFile":
        return SpecFile(self.labels, graph, self.productions, self.rules, self.scenario)


# -- lexer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<int>[0-9]+)
  | (?P<op>==|!=|<=|>=|[{}();:,/!@#=<>])
    """,
    re.VERBOSE,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, op, eof
    text: str
    pos: int


class _Fail(Exception):
    pass


def _tokens(text: str, errors: list) -> list[Token]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            errors.append(("BAD_CHARACTER", f"unexpected character {text[i]!r}", i))
            i += 1
            continue
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), i))
        i = m.end()
    out.append(Token("eof", "", len(text)))
    return out


SECTIONS = {"labels", "graph", "production", "use", "rule", "scenario"}
MAX_ERRORS = 200
MAX_DEPTH = 64


class Parser:
    """Recursive-descent parser.  Errors are collected with positions and
    parsing resumes at the next statement or section."""

    def __init__(self, text: str):
        self.text = text
        self._raw_errors: list[tuple[str, str, int]] = []
        self.toks = _tokens(text, self._raw_errors)
        self.i = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    # -- diagnostics --------------------------------------------------------

    def span(self, pos: int) -> SourceSpan:
        import bisect

        line = bisect.bisect_right(self._line_starts, pos)
        col = pos - self._line_starts[line - 1] + 1
        return SourceSpan(line, col, len(self.text[:pos].encode("utf-8")))

    def error(self, code: str, message: str, pos: int | None = None) -> None:
        if pos is None:
            pos = self.peek().pos
        if len(self._raw_errors) < MAX_ERRORS:
            self._raw_errors.append((code, message, pos))

    def diagnostics(self) -> list[Diagnostic]:
        return [Diagnostic(c, m, self.span(p)) for c, m, p in sorted(self._raw_errors, key=lambda e: e[2])]

    # -- token helpers --------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("op", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.peek()
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.peek()
            self.error("SYNTAX", f"expected {text!r}, found {t.text or 'end of input'!r}")
            raise _Fail
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            self.error("SYNTAX", f"expected {what}, found {t.text or 'end of input'!r}")
            raise _Fail
        return self.advance()

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "int":
            self.error("SYNTAX", f"expected integer, found {t.text or 'end of input'!r}")
            raise _Fail
        self.advance()
        return int(t.text)

    def ident_list(self, close: str) -> list[Token]:
        items = []
        if self.at(close):
            return items
        items.append(self.ident())
        while self.accept(","):
            items.append(self.ident())
        return items

    def recover_statement(self) -> None:
        """Skip past the current statement: up to and including ``;`` at
        the current depth, or up to (not including) an unmatched ``}``."""
        depth = 0
        while self.peek().kind != "eof":
            t = self.peek()
            if t.text == "{" and t.kind == "op":
                depth += 1
            elif t.text == "}" and t.kind == "op":
                if depth == 0:
                    return
                depth -= 1
                if depth == 0:
                    self.advance()
                    return
            elif t.text == ";" and t.kind == "op" and depth == 0:
                self.advance()
                return
            self.advance()

    def recover_section(self) -> None:
        depth = 0
        while self.peek().kind != "eof":
            t = self.peek()
            if depth == 0 and t.kind == "ident" and t.text in SECTIONS:
                return
            if t.kind == "op" and t.text == "{":
                depth += 1
            elif t.kind == "op" and t.text == "}":
                depth = max(0, depth - 1)
            self.advance()

    def block(self, parse_stmt) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.error("SYNTAX", "unterminated block")
                raise _Fail
            start = self.i
            try:
                parse_stmt()
            except _Fail:
                self.recover_statement()
                if self.i == start:
                    self.advance()
        self.expect("}")

    # -- grammar ----------------------------------------------------------------

    def parse(self) -> "_Raw":
        raw = _Raw()
        while self.peek().kind != "eof":
            t = self.peek()
            start = self.i
            try:
                if t.kind == "ident" and t.text in SECTIONS:
                    getattr(self, f"_section_{t.text}")(raw)
                else:
                    self.error("SYNTAX", f"expected a section keyword, found {t.text!r}")
                    raise _Fail
            except _Fail:
                if self.i == start:
                    self.advance()
                self.recover_section()
        return raw

    def _section_labels(self, raw: "_Raw") -> None:
        self.advance()

        def stmt():
            name = self.ident("label name")
            self.expect("/")
            arity = self.integer()
            self.expect(";")
            raw.labels.append((name.text, arity, name.pos))

        self.block(stmt)

    def _graph_body(self, out: "_RawGraph") -> None:
        def stmt():
            kw = self.ident("'node' or 'edge'")
            if kw.text == "node":
                for t in self.ident_list(";"):
                    out.nodes.append((t.text, t.pos))
                self.expect(";")
            elif kw.text == "edge":
                first = self.ident("edge label")
                name = ""
                if self.accept(":"):
                    name = first.text
                    first = self.ident("edge label")
                self.expect("(")
                args = self.ident_list(")")
                self.expect(")")
                self.expect(";")
                out.edges.append((name, first.text, [(a.text, a.pos) for a in args], first.pos))
            else:
                self.error("SYNTAX", f"expected 'node' or 'edge', found {kw.text!r}", kw.pos)
                raise _Fail

        self.block(stmt)

    def _section_graph(self, raw: "_Raw") -> None:
        t = self.advance()
        if raw.graph is not None:
            self.error("DUPLICATE_SECTION", "graph declared twice", t.pos)
        g = _RawGraph(t.pos)
        self._graph_body(g)
        if raw.graph is None:
            raw.graph = g

    def _action(self) -> tuple[str, int]:
        t = self.ident("action name")
        name = t.text
        if self.accept("@"):
            name = f"{name}_{self.ident('action role').text}"
        return name, t.pos

    def _section_production(self, raw: "_Raw") -> None:
        start = self.advance()
        name = self.ident("production name")
        self.expect("for")
        label = self.ident("label")
        self.expect("(")
        formals = self.ident_list(")")
        self.expect(")")
        p = _RawProduction(name.text, label.text, [f.text for f in formals], start.pos)

        def rhs_stmt():
            kw = self.ident("'node' or 'edge'")
            if kw.text == "node":
                p.rhs_nodes.extend(t.text for t in self.ident_list(";"))
                self.expect(";")
            elif kw.text == "edge":
                lab = self.ident("edge label")
                self.expect("(")
                args = self.ident_list(")")
                self.expect(")")
                self.expect(";")
                p.rhs_edges.append((lab.text, [a.text for a in args], lab.pos))
            else:
                self.error("SYNTAX", f"expected 'node' or 'edge', found {kw.text!r}", kw.pos)
                raise _Fail

        def stmt():
            kw = self.ident("'new', 'on' or 'rhs'")
            if kw.text == "new":
                while True:
                    n = self.ident("fresh name")
                    p.fresh.append(n.text)
                    if self.accept("as"):
                        p.hints[n.text] = self.ident("display name").text
                    if not self.accept(","):
                        break
                self.expect(";")
            elif kw.text == "on":
                t = self.peek()
                if t.kind == "int":
                    where: int | str = self.integer()
                else:
                    where = self.ident("tentacle index or formal").text
                self.expect(":")
                action, apos = self._action()
                output = self.accept("!")
                self.expect("(")
                comm = self.ident_list(")")
                self.expect(")")
                self.expect(";")
                p.conditions.append((where, action, output, [c.text for c in comm], kw.pos))
            elif kw.text == "rhs":
                if p.has_rhs:
                    self.error("DUPLICATE_SECTION", "rhs given twice", kw.pos)
                p.has_rhs = True
                self.block(rhs_stmt)
            else:
                self.error("SYNTAX", f"expected 'new', 'on' or 'rhs', found {kw.text!r}", kw.pos)
                raise _Fail

        self.block(stmt)
        raw.productions.append(p)

    def _comm_args(self, close: str) -> list:
        args: list = []
        if self.at(close):
            return args
        while True:
            t = self.peek()
            if t.kind == "int":
                args.append(self.integer())
            elif t.kind == "ident" and t.text == "new":
                self.advance()
                hint = None
                if self.peek().kind == "ident" and not self.at("as"):
                    hint = self.advance().text
                args.append(Fresh(hint))
            else:
                self.error("SYNTAX", f"expected tentacle index or 'new', found {t.text or 'end of input'!r}")
                raise _Fail
            if not self.accept(","):
                return args

    def _section_use(self, raw: "_Raw") -> None:
        self.advance()
        try:
            while True:
                t = self.ident("library production")
                if t.text == "am_emit":
                    self.expect("(")
                    action, _ = self._action()
                    args: list = []
                    if self.accept(";"):
                        args = self._comm_args(")")
                    self.expect(")")
                    alias = None
                    if self.accept("as"):
                        alias = self.ident("production name").text
                    raw.emitters.append((action, args, alias, t.pos))
                else:
                    raw.uses.append((t.text, t.pos))
                if not self.accept(","):
                    break
            self.expect(";")
        except _Fail:
            self.recover_statement()

    def _section_rule(self, raw: "_Raw") -> None:
        self.advance()

        def stmt():
            kw = self.expect("when")
            event = self.ident("event name")
            guard: Guard = Always()
            if self.accept("if"):
                guard = self.guard()
            self.expect("then")
            op = self.ident("operation")
            self.expect("(")
            self.expect("target")
            target = self.selector()
            args: list = []
            if self.accept(";"):
                args = self._comm_args(")")
            self.expect(")")
            self.expect(";")
            raw.rules.append((PolicyRule(event.text, guard, op.text, target, tuple(args)), kw.pos))

        self.block(stmt)

    def selector(self):
        t = self.ident("target")
        if self.accept("#"):
            return ByOrdinal(t.text, self.integer())
        return ByName(t.text)

    def guard(self, depth: int = 0) -> Guard:
        if depth > MAX_DEPTH:
            self.error("TOO_DEEP", "guard nested too deeply")
            raise _Fail
        left = self._guard_and(depth)
        while self.accept("or"):
            left = Or(left, self._guard_and(depth))
        return left

    def _guard_and(self, depth: int) -> Guard:
        left = self._guard_unary(depth)
        while self.accept("and"):
            left = And(left, self._guard_unary(depth))
        return left

    def _guard_unary(self, depth: int) -> Guard:
        if depth > MAX_DEPTH:
            self.error("TOO_DEEP", "guard nested too deeply")
            raise _Fail
        if self.accept("not"):
            return Not(self._guard_unary(depth + 1))
        if self.accept("("):
            g = self.guard(depth + 1)
            self.expect(")")
            return g
        if self.accept("true"):
            return Always()
        if self.accept("count"):
            self.expect("(")
            label = self.ident("label").text
            self.expect(")")
            t = self.peek()
            if t.kind != "op" or t.text not in COMPARATORS:
                self.error("SYNTAX", f"expected comparison, found {t.text or 'end of input'!r}")
                raise _Fail
            self.advance()
            return Count(label, t.text, self.integer())
        if self.accept("exists"):
            self.expect("(")
            label = self.ident("label").text
            self.expect(",")
            index = self.integer()
            self.expect(",")
            node = self.ident("node name").text
            self.expect(")")
            return Exists(label, index, node)
        t = self.peek()
        self.error("SYNTAX", f"expected guard, found {t.text or 'end of input'!r}")
        raise _Fail

    def _section_scenario(self, raw: "_Raw") -> None:
        self.advance()

        def stmt():
            kw = self.ident("scenario step")
            if kw.text == "inject":
                name = self.ident("event name").text
                payload = {}
                if self.accept("("):
                    while not self.at(")"):
                        k = self.ident("payload key").text
                        self.expect("=")
                        v = self.advance()
                        if v.kind not in ("ident", "int"):
                            self.error("SYNTAX", "expected payload value", v.pos)
                            raise _Fail
                        payload[k] = v.text
                        if not self.accept(","):
                            break
                    self.expect(")")
                self.expect(";")
                raw.scenario.append((Inject(Event(name, payload)), kw.pos))
            elif kw.text == "apply":
                idx = self.integer()
                self.expect(";")
                raw.scenario.append((ApplyStep(idx), kw.pos))
            elif kw.text == "run":
                limit = self.integer() if self.peek().kind == "int" else None
                self.expect(";")
                raw.scenario.append((RunSteps(limit), kw.pos))
            elif kw.text == "assert":
                if self.accept("iso"):
                    g = _RawGraph(kw.pos)
                    self._graph_body(g)
                    self.accept(";")
                    raw.scenario.append((g, kw.pos))
                else:
                    guard = self.guard()
                    self.expect(";")
                    raw.scenario.append((AssertGuard(guard), kw.pos))
            else:
                self.error("SYNTAX", f"unknown scenario step {kw.text!r}", kw.pos)
                raise _Fail

        self.block(stmt)


@dataclass
class _RawGraph:
    pos: int
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)


@dataclass
class _RawProduction:
    name: str
    label: str
    formals: list
    pos: int
    fresh: list = field(default_factory=list)
    hints: dict = field(default_factory=dict)
    conditions: list = field(default_factory=list)
    rhs_edges: list = field(default_factory=list)
    rhs_nodes: list = field(default_factory=list)
    has_rhs: bool = False


@dataclass
class _Raw:
    labels: list = field(default_factory=list)
    graph: _RawGraph | None = None
    productions: list = field(default_factory=list)
    uses: list = field(default_factory=list)
    emitters: list = field(default_factory=list)
    rules: list = field(default_factory=list)
    scenario: list = field(default_factory=list)


# -- resolution ---------------------------------------------------------------


class _Resolver:
    def __init__(self, parser: Parser, raw: _Raw):
        self.p = parser
        self.raw = raw
        self.labels: dict[str, Label] = {}

    def error(self, code, msg, pos):
        self.p.error(code, msg, pos)

    def label(self, name: str, pos: int) -> Label | None:
        lab = self.labels.get(name)
        if lab is None:
            self.error("UNKNOWN_LABEL", f"label {name!r} is not declared", pos)
        return lab

    def declare(self, label: Label, pos: int) -> None:
        known = self.labels.get(label.name)
        if known is not None and known.arity != label.arity:
            self.error("LABEL_ARITY_CLASH", f"label {label.name!r} declared as {known} and {label}", pos)
        self.labels.setdefault(label.name, label)

    def graph(self, g: _RawGraph) -> Hypergraph:
        nodes: dict[str, Node] = {}
        for name, pos in g.nodes:
            if name in nodes:
                self.error("DUPLICATE_NODE", f"node {name!r} declared twice", pos)
                continue
            nodes[name] = Node(len(nodes), name)
        edges = []
        names = set()
        for ename, lname, args, pos in g.edges:
            lab = self.label(lname, pos)
            targets = []
            for a, apos in args:
                if a not in nodes:
                    self.error("UNKNOWN_NODE", f"node {a!r} is not declared", apos)
                else:
                    targets.append(nodes[a])
            if ename:
                if ename in names:
                    self.error("DUPLICATE_EDGE", f"edge name {ename!r} used twice", pos)
                names.add(ename)
            if lab is None or len(targets) != len(args):
                continue
            if len(targets) != lab.arity:
                self.error("ARITY_MISMATCH", f"{lab} given {len(targets)} tentacles", pos)
                continue
            edges.append(Edge(len(edges), lab, tuple(targets), ename))
        return Hypergraph(nodes.values(), edges)

    def production(self, rp: _RawProduction) -> Production | None:
        lab = self.label(rp.label, rp.pos)
        if lab is None:
            return None
        conds: dict[int, Condition] = {}
        ok = True
        for where, action, output, comm, pos in rp.conditions:
            if isinstance(where, str):
                if where not in rp.formals:
                    self.error("UNKNOWN_FORMAL", f"no formal {where!r} in {rp.name!r}", pos)
                    ok = False
                    continue
                where = rp.formals.index(where)
            if where in conds:
                self.error("DUPLICATE_CONDITION", f"tentacle {where} conditioned twice in {rp.name!r}", pos)
                ok = False
                continue
            pol = Polarity.OUTPUT if output else Polarity.INPUT
            conds[where] = Condition(pol, Action(action, len(comm)), tuple(comm))
        rhs_edges = []
        for lname, args, pos in rp.rhs_edges:
            rl = self.label(lname, pos)
            if rl is None:
                ok = False
                continue
            rhs_edges.append((rl, tuple(args)))
        if not ok:
            return None
        return Production(
            rp.name, lab, tuple(rp.formals), conds, tuple(rp.fresh), Rhs(tuple(rhs_edges), tuple(rp.rhs_nodes)), rp.hints
        )

    def resolve(self) -> SpecFile:
        raw = self.raw
        for name, arity, pos in raw.labels:
            self.declare(Label(name, arity), pos)

        prods: list[tuple[Production, int]] = []
        for name, pos in raw.uses:
            make = gcm.LIBRARY.get(name)
            if make is None:
                self.error("UNKNOWN_LIBRARY", f"no library production {name!r}", pos)
                continue
            prod = make()
            for lab in {prod.label, *(lab for lab, _ in prod.rhs.edges)}:
                self.declare(lab, pos)
            prods.append((prod, pos))
        for action, args, alias, pos in raw.emitters:
            act = gcm.ACTIONS.get(action)
            if act is None:
                self.error("UNKNOWN_ACTION", f"no library action {action!r}", pos)
                continue
            spec = [a if isinstance(a, int) else (gcm.NEW, a.hint) for a in args]
            try:
                prod = gcm.am_emitter(act, spec, name=alias)
            except (ValueError, ArityMismatch) as exc:
                self.error("ACTION_ARITY_CLASH" if "needs" in str(exc) else "BAD_EMITTER", str(exc), pos)
                continue
            self.declare(gcm.AM, pos)
            prods.append((prod, pos))

        graph = self.graph(raw.graph) if raw.graph is not None else Hypergraph()

        for rp in raw.productions:
            prod = self.production(rp)
            if prod is not None:
                prods.append((prod, rp.pos))

        for prod, pos in prods:
            for d in validate(prod):
                self.error(d.code, d.message, pos)
        rules = []
        for rule, pos in raw.rules:
            for d in rule.check():
                self.error(d.code, d.message, pos)
            rules.append(rule)
        emitted = [r.emitter(f"{r.operation}_r{i}") for i, r in enumerate(rules) if not r.check()]
        positions = {p.name: pos for p, pos in prods}
        for d in validate_all([p for p, _ in prods] + emitted):
            if d.code in ("ACTION_ARITY_CLASH", "LABEL_ARITY_CLASH", "DUPLICATE_PRODUCTION"):
                pos = next((positions[n] for n in sorted(positions, key=positions.get) if repr(n) in d.message), 0)
                self.error(d.code, d.message, pos)

        scenario = []
        for step, pos in raw.scenario:
            if isinstance(step, _RawGraph):
                step = AssertIso(self.graph(step))
            scenario.append(step)

        uniq = {}
        for p, _ in prods:
            uniq.setdefault(p.name, p)
        return SpecFile(
            tuple(sorted(self.labels.values(), key=lambda lab: lab.name)),
            graph,
            tuple(sorted(uniq.values(), key=lambda p: p.name)),
            tuple(rules),
            tuple(scenario),
        )


def check(text: str) -> tuple[SpecFile | None, list[Diagnostic]]:
    """Parse and resolve ``text``; returns the spec (``None`` on errors)
    and every diagnostic found."""
    parser = Parser(text)
    raw = parser.parse()
    spec = _Resolver(parser, raw).resolve()
    diags = parser.diagnostics()
    return (None if diags else spec), diags


def parse(text: str) -> SpecFile:
    spec, diags = check(text)
    if diags:
        raise DslError(diags)
    return spec


def load(path) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# -- serialisation -------------------------------------------------------------


def _clean(name: str) -> str:
    if IDENT_RE.match(name):
        return name
    name = re.sub(r"[^A-Za-z0-9_']", "_", name)
    if not name or not (name[0].isalpha() or name[0] == "_"):
        name = "_" + name
    return name


def _unique_names(items, name_of) -> dict:
    """Legal, pairwise distinct identifiers for ``items`` (kept in order)."""
    out, taken = {}, set()
    for item in items:
        base = name_of(item)
        if not base:
            out[item] = ""
            continue
        name = _clean(base)
        if name in taken:
            name = f"{name}_{item.id}"
            while name in taken:
                name += "_"
        taken.add(name)
        out[item] = name
    return out


def _graph_lines(graph: Hypergraph, indent: str = "  ") -> list[str]:
    nodes = graph.nodes
    names = _unique_names(nodes, lambda n: n.name or f"_{n.id}")
    lines = []
    if nodes:
        lines.append(f"{indent}node {', '.join(names[n] for n in nodes)};")
    enames = _unique_names(graph.edges, lambda e: e.name)
    for e in graph.edges:
        args = ", ".join(names[n] for n in e.tentacles)
        prefix = f"{enames[e]}: " if enames[e] else ""
        lines.append(f"{indent}edge {prefix}{e.label.name}({args});")
    return lines


def serialize_graph(graph: Hypergraph) -> str:
    return "\n".join(["graph {", *_graph_lines(graph), "}"]) + "\n"


def _action_text(name: str) -> str:
    return "rep@store" if name == gcm.REP_STORE.name else name


def serialize_production(p: Production) -> str:
    lines = [f"production {p.name} for {p.label.name}({', '.join(p.formals)}) {{"]
    if p.fresh:
        decl = ", ".join(f"{n} as {p.hints[n]}" if n in p.hints else n for n in p.fresh)
        lines.append(f"  new {decl};")
    for i, c in p.conditions.items():
        bang = "!" if c.polarity is Polarity.OUTPUT else ""
        lines.append(f"  on {i}: {_action_text(c.action.name)}{bang}({', '.join(c.comm)});")
    lines.append("  rhs {")
    for label, args in p.rhs.edges:
        lines.append(f"    edge {label.name}({', '.join(args)});")
    if p.rhs.nodes:
        lines.append(f"    node {', '.join(p.rhs.nodes)};")
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _guard_text(g: Guard, parent: int = 0) -> str:
    # precedence: or=1, and=2, unary=3
    if isinstance(g, Or):
        s, prec = f"{_guard_text(g.left, 1)} or {_guard_text(g.right, 2)}", 1
    elif isinstance(g, And):
        s, prec = f"{_guard_text(g.left, 2)} and {_guard_text(g.right, 3)}", 2
    elif isinstance(g, Not):
        return f"not {_guard_text(g.arg, 3)}"
    elif isinstance(g, Count):
        return f"count({g.label}) {g.op} {g.value}"
    elif isinstance(g, Exists):
        return f"exists({g.label}, {g.index}, {g.node})"
    else:
        return "true"
    return f"({s})" if prec < parent else s


def _args_text(args) -> str:
    parts = []
    for a in args:
        if isinstance(a, Fresh):
            parts.append(f"new {a.hint}" if a.hint else "new")
        else:
            parts.append(str(a))
    return ", ".join(parts)


def serialize_rule(r: PolicyRule) -> str:
    guard = "" if isinstance(r.guard, Always) else f" if {_guard_text(r.guard)}"
    args = f"; {_args_text(r.args)}" if r.args else ""
    return f"when {r.event}{guard} then {r.operation}(target {r.target}{args});"


def _step_lines(step: ScenarioStep) -> list[str]:
    if isinstance(step, Inject):
        payload = ""
        if step.event.payload:
            payload = "(" + ", ".join(f"{k}={v}" for k, v in step.event.payload.items()) + ")"
        return [f"  inject {step.event.name}{payload};"]
    if isinstance(step, ApplyStep):
        return [f"  apply {step.index};"]
    if isinstance(step, RunSteps):
        return [f"  run{'' if step.limit is None else ' ' + str(step.limit)};"]
    if isinstance(step, AssertGuard):
        return [f"  assert {_guard_text(step.guard)};"]
    return ["  assert iso {", *_graph_lines(step.graph, "    "), "  }"]


def serialize(spec: SpecFile) -> str:
    """Canonical text: labels, graph, productions, rules, scenario; empty
    sections are omitted."""
    chunks = []
    if spec.labels:
        body = "".join(f"  {lab.name}/{lab.arity};\n" for lab in sorted(spec.labels, key=lambda lab: lab.name))
        chunks.append("labels {\n" + body + "}\n")
    if spec.graph.nodes or spec.graph.edges:
        chunks.append(serialize_graph(spec.graph))
    for p in sorted(spec.productions, key=lambda p: p.name):
        chunks.append(serialize_production(p))
    if spec.rules:
        chunks.append("rule {\n" + "".join(f"  {serialize_rule(r)}\n" for r in spec.rules) + "}\n")
    if spec.scenario:
        lines = [line for s in spec.scenario for line in _step_lines(s)]
        chunks.append("scenario {\n" + "\n".join(lines) + "\n}\n")
    return "\n".join(chunks)


def iter_fixture_paths() -> Iterator:
    """Paths of the ``.shr`` fixtures shipped with the package."""
    from importlib import resources

    root = resources.files("shr") / "fixtures"
    return iter(sorted((p for p in root.iterdir() if p.name.endswith(".shr")), key=lambda p: p.name))
