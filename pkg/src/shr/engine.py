"""Synchronised rewriting of hypergraphs.

A step assigns at most one production to each edge, checks that the
conditions meeting at every node are compatible under the synchronisation
policy, unifies the communicated vectors into a node fusion, and replaces
each assigned edge with its grounded rhs.

Enumeration is exhaustive over assignments and therefore exponential in
the number of edges.  It is meant for desk-scale assemblies (about ten
edges); cheap polarity/action pre-checks keep the common cases fast.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .hypergraph import Edge, Hypergraph, Node
from .production import (
    Condition,
    FreshAllocator,
    GroundCondition,
    InstantiatedRule,
    LabelMismatch,
    Polarity,
    Production,
    instantiate,
)


class SyncPolicy(enum.Enum):
    MILNER = "milner"
    BROADCAST = "broadcast"


class Rejection(enum.Enum):
    TOO_MANY_OUTPUTS = "TooManyOutputs"
    UNMATCHED_INPUT = "UnmatchedInput"
    UNMATCHED_OUTPUT = "UnmatchedOutput"
    ACTION_NAME_MISMATCH = "ActionNameMismatch"
    COMM_LENGTH_MISMATCH = "CommLengthMismatch"
    IDLE_BYSTANDER = "IdleBystanderInBroadcast"


class ExistingNodeFusion(Exception):
    """Two distinct pre-existing nodes ended up in one fusion class."""


class StaleTransition(Exception):
    pass


@dataclass(frozen=True)
class NodeCheck:
    ok: bool
    equations: tuple[tuple[Node, Node], ...] = ()
    reason: Rejection | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Sync:
    """One synchronisation that fired at ``node``."""

    node: Node
    action: str
    output_edge: int
    input_edges: tuple[int, ...]


@dataclass(frozen=True)
class Transition:
    assignment: tuple[tuple[int, str], ...]
    fusion: Mapping[Node, Node]
    fired: tuple[Sync, ...]
    result: Hypergraph
    source: Hypergraph = field(repr=False, compare=False)

    @property
    def key(self) -> tuple[tuple[int, str], ...]:
        return self.assignment

    def describe(self) -> str:
        names = {e.id: e.name or f"e{e.id}" for e in self.source.edges}
        assign = ", ".join(f"{names[e]}:{p}" for e, p in self.assignment)
        fired = "; ".join(
            f"{s.action}@{s.node} {names[s.output_edge]}->{'+'.join(names[i] for i in s.input_edges)}"
            for s in self.fired
        )
        fusion = ", ".join(f"{a}={b}" for a, b in sorted(self.fusion.items()))
        return f"[{assign}] fired {{{fired}}} fusion {{{fusion}}}"


Registry = Sequence[Production]
Assignment = Mapping[int, Production]


def _by_label(productions: Iterable[Production]) -> dict[str, list[Production]]:
    table: dict[str, list[Production]] = defaultdict(list)
    for p in productions:
        table[p.label.name].append(p)
    for plist in table.values():
        plist.sort(key=lambda p: p.name)
    return table


def instantiate_assignment(
    graph: Hypergraph, assignment: Assignment, allocate: Callable[[str | None], Node] | None = None
) -> dict[int, InstantiatedRule]:
    """Instantiate each assigned production, in edge-id order so that fresh
    node numbering is reproducible."""
    if allocate is None:
        allocate = FreshAllocator(graph.next_node_id)
    out = {}
    for eid in sorted(assignment):
        out[eid] = instantiate(assignment[eid], graph.edge(eid), allocate)
    return out


def collect_conditions(
    graph: Hypergraph, assignment: Assignment, allocate: Callable[[str | None], Node] | None = None
) -> dict[Node, list[GroundCondition]]:
    """Group the grounded non-idle conditions of the assigned productions by
    the node they are imposed on.  Every node of ``graph`` is a key."""
    rules = instantiate_assignment(graph, assignment, allocate)
    return _group(graph, rules)


def _group(graph: Hypergraph, rules: Mapping[int, InstantiatedRule]) -> dict[Node, list[GroundCondition]]:
    table: dict[Node, list[GroundCondition]] = {n: [] for n in graph.nodes}
    for eid in sorted(rules):
        for gc in rules[eid].conditions:
            table[gc.node].append(gc)
    for conds in table.values():
        conds.sort(key=lambda gc: (gc.edge_id, gc.index))
    return table


def _conds(conditions: Sequence) -> list[Condition]:
    return [c.condition if isinstance(c, GroundCondition) else c for c in conditions]


def check_node(conditions: Sequence, policy: SyncPolicy, attached_count: int) -> NodeCheck:
    """Decide whether the conditions meeting at one node synchronise.

    ``conditions`` may hold :class:`Condition` or :class:`GroundCondition`
    items; idle ones are ignored.  On success the returned equations pair
    each input's communicated node with the output's, position by position.
    """
    conds = [c for c in _conds(conditions) if not c.is_idle]
    if not conds:
        return NodeCheck(True)
    outputs = [c for c in conds if c.polarity is Polarity.OUTPUT]
    inputs = [c for c in conds if c.polarity is Polarity.INPUT]
    if len(outputs) > 1:
        return NodeCheck(False, reason=Rejection.TOO_MANY_OUTPUTS)
    if not outputs:
        return NodeCheck(False, reason=Rejection.UNMATCHED_INPUT)
    if not inputs:
        return NodeCheck(False, reason=Rejection.UNMATCHED_OUTPUT)
    out = outputs[0]
    if policy is SyncPolicy.MILNER and len(inputs) > 1:
        return NodeCheck(False, reason=Rejection.UNMATCHED_INPUT)
    for c in inputs:
        if c.action.name != out.action.name:
            return NodeCheck(False, reason=Rejection.ACTION_NAME_MISMATCH)
        if len(c.comm) != len(out.comm):
            return NodeCheck(False, reason=Rejection.COMM_LENGTH_MISMATCH)
    if policy is SyncPolicy.BROADCAST and len(inputs) != attached_count - 1:
        return NodeCheck(False, reason=Rejection.IDLE_BYSTANDER)
    eqs = tuple((x, y) for c in inputs for x, y in zip(c.comm, out.comm))
    return NodeCheck(True, eqs)


def unify(equations: Iterable[tuple[Node, Node]], pre_existing: Iterable[Node]) -> dict[Node, Node]:
    """Union-find closure of ``equations``.

    Each class is represented by its pre-existing member if it has one,
    else by its fresh member with the smallest id.  Returns the non-identity
    entries of the resulting substitution.
    """
    existing = set(pre_existing)
    parent: dict[Node, Node] = {}

    def find(x: Node) -> Node:
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def better(a: Node, b: Node) -> bool:
        return (a not in existing, a.id) < (b not in existing, b.id)

    for a, b in equations:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if ra in existing and rb in existing:
            raise ExistingNodeFusion(f"cannot fuse pre-existing nodes {ra} and {rb}")
        if better(ra, rb):
            parent[rb] = ra
        else:
            parent[ra] = rb
    return {x: find(x) for x in parent if find(x) != x}


def _fired(table: Mapping[Node, list[GroundCondition]]) -> tuple[Sync, ...]:
    syncs = []
    for node in sorted(table, key=lambda n: n.id):
        conds = table[node]
        if not conds:
            continue
        out = next(gc for gc in conds if gc.condition.polarity is Polarity.OUTPUT)
        ins = tuple(gc.edge_id for gc in conds if gc.condition.polarity is Polarity.INPUT)
        syncs.append(Sync(node, out.condition.action.name, out.edge_id, ins))
    return tuple(syncs)


def _build_result(
    graph: Hypergraph, rules: Mapping[int, InstantiatedRule], fusion: Mapping[Node, Node]
) -> Hypergraph:
    # fused fresh classes take the first display-name hint among their members
    named: dict[Node, str] = {}
    hinted = {n for r in rules.values() for name, n in r.binding.items() if name in r.production.hints}
    for n in sorted(hinted, key=lambda n: n.id):
        rep = fusion.get(n, n)
        named.setdefault(rep, n.name)

    def resolve(n: Node) -> Node:
        rep = fusion.get(n, n)
        if rep in named and not graph.has_node(rep):
            return Node(rep.id, named[rep])
        return rep

    nodes: dict[int, Node] = {n.id: n for n in graph.nodes}
    edges: dict[int, Edge] = {e.id: e for e in graph.edges if e.id not in rules}
    next_edge = graph.next_edge_id
    next_node = graph.next_node_id
    for eid in sorted(rules):
        rule = rules[eid]
        old = rule.edge
        inherited = False
        for label, args in rule.rhs_edges:
            targets = tuple(resolve(n) for n in args)
            for n in targets:
                nodes.setdefault(n.id, n)
            if not inherited and label == old.label:
                # the first same-label rhs edge continues the rewritten one
                edges[old.id] = Edge(old.id, label, targets, old.name)
                inherited = True
            else:
                edges[next_edge] = Edge(next_edge, label, targets, "")
                next_edge += 1
        for n in rule.rhs_nodes:
            r = resolve(n)
            nodes.setdefault(r.id, r)
        for n in rule.fresh:
            next_node = max(next_node, n.id + 1)
    return Hypergraph(nodes.values(), edges.values(), next_node, next_edge)


def _pre_screen(
    graph: Hypergraph, choice: Sequence[tuple[Edge, Production | None]], policy: SyncPolicy, attach
) -> bool:
    # polarity/action bookkeeping only; full instantiation happens afterwards
    meet: dict[int, list[Condition]] = defaultdict(list)
    for edge, prod in choice:
        if prod is None:
            continue
        for i, c in prod.conditions.items():
            meet[edge.tentacles[i].id].append(c)
    for nid, conds in meet.items():
        if not check_node(conds, policy, len(attach[nid])):
            return False
    return True


def evaluate_assignment(
    graph: Hypergraph, assignment: Assignment, policy: SyncPolicy
) -> Transition | None:
    """Build the transition for one assignment, or ``None`` if some node
    rejects it or it would fuse two pre-existing nodes."""
    if not assignment:
        return None
    attach = graph.attachment_index()
    rules = instantiate_assignment(graph, assignment)
    table = _group(graph, rules)
    equations = []
    for node, conds in table.items():
        res = check_node(conds, policy, len(attach[node.id]))
        if not res:
            return None
        equations.extend(res.equations)
    try:
        fusion = unify(equations, graph.nodes)
    except ExistingNodeFusion:
        return None
    result = _build_result(graph, rules, fusion)
    key = tuple((eid, assignment[eid].name) for eid in sorted(assignment))
    return Transition(key, _FusionMap(sorted(fusion.items())), _fired(table), result, graph)


class _FusionMap(dict):
    def __hash__(self):
        return hash(tuple(self.items()))


def candidates(
    graph: Hypergraph, productions: Registry, extra: Mapping[int, Sequence[Production]] | None = None
) -> list[tuple[Edge, list[Production | None]]]:
    """Per edge, ``None`` (idle) followed by the productions for its label."""
    table = _by_label(productions)
    out = []
    for e in graph.edges:
        opts = [p for p in table.get(e.label.name, []) if p.label == e.label]
        if extra and e.id in extra:
            opts = sorted({p.name: p for p in [*opts, *extra[e.id]]}.values(), key=lambda p: p.name)
        out.append((e, [None, *opts]))
    return out


def applicable_steps(
    graph: Hypergraph,
    productions: Registry,
    policy: SyncPolicy = SyncPolicy.MILNER,
    extra: Mapping[int, Sequence[Production]] | None = None,
) -> list[Transition]:
    """All non-idle transitions from ``graph``, ordered by their
    ``(edge_id, production name)`` assignment keys.

    ``extra`` adds productions available only to particular edges.
    """
    cands = candidates(graph, productions, extra)
    attach = graph.attachment_index()
    found = []
    for combo in itertools.product(*(opts for _, opts in cands)):
        choice = [(e, p) for (e, _), p in zip(cands, combo)]
        if all(p is None for _, p in choice):
            continue
        if not _pre_screen(graph, choice, policy, attach):
            continue
        t = evaluate_assignment(graph, {e.id: p for e, p in choice if p is not None}, policy)
        if t is not None:
            found.append(t)
    found.sort(key=lambda t: t.key)
    return found


def apply(graph: Hypergraph, transition: Transition) -> Hypergraph:
    if transition.source != graph:
        raise StaleTransition("transition was computed for a different graph")
    return transition.result


# -- runs and traces ---------------------------------------------------

Chooser = Callable[[list[Transition]], "Transition | None"]


def first(transitions: list[Transition]) -> Transition | None:
    return transitions[0] if transitions else None


def digest(graph: Hypergraph) -> str:
    from .dsl import serialize_graph

    return hashlib.sha256(serialize_graph(graph).encode("utf-8")).hexdigest()


def _node_ref(n: Node) -> str:
    return f"{n}@{n.id}"


@dataclass(frozen=True)
class TraceStep:
    step: int
    transition: Transition

    @property
    def result(self) -> Hypergraph:
        return self.transition.result

    def record(self) -> dict:
        t = self.transition
        names = {e.id: e.name or f"e{e.id}" for e in t.source.edges}
        return {
            "step": self.step,
            "assignment": [[names[e], p] for e, p in t.assignment],
            "fired": [
                {
                    "node": _node_ref(s.node),
                    "action": s.action,
                    "output": names[s.output_edge],
                    "inputs": [names[i] for i in s.input_edges],
                }
                for s in t.fired
            ],
            "fusion": {_node_ref(a): _node_ref(b) for a, b in sorted(t.fusion.items())},
            "result_digest": digest(t.result),
        }


@dataclass
class Trace:
    initial: Hypergraph
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def final(self) -> Hypergraph:
        return self.steps[-1].result if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)

    def append(self, transition: Transition) -> None:
        self.steps.append(TraceStep(len(self.steps) + 1, transition))

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s.record(), sort_keys=True) + "\n" for s in self.steps)


def run(
    graph: Hypergraph,
    productions: Registry,
    policy: SyncPolicy = SyncPolicy.MILNER,
    chooser: Chooser = first,
    max_steps: int = 100,
) -> Trace:
    """Apply chosen transitions until none is left or ``max_steps`` is hit."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    trace = Trace(graph)
    current = graph
    for _ in range(max_steps):
        t = chooser(applicable_steps(current, productions, policy))
        if t is None:
            break
        trace.append(t)
        current = apply(current, t)
    return trace


__all__ = [
    "ExistingNodeFusion",
    "LabelMismatch",
    "NodeCheck",
    "Rejection",
    "StaleTransition",
    "Sync",
    "SyncPolicy",
    "Trace",
    "TraceStep",
    "Transition",
    "applicable_steps",
    "apply",
    "check_node",
    "collect_conditions",
    "digest",
    "evaluate_assignment",
    "run",
    "unify",
]
