"""A minimal autonomic manager: ``when event if guard then operation`` rules.

Guards look at the shape of the assembly only.  When a rule fires it arms
a manager emitter on the ``am`` edge sharing the target's manager port; the
engine then has to find a step in which that emitter synchronises with the
target.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from . import gcm
from .engine import SyncPolicy, Transition, applicable_steps
from .hypergraph import Edge, Hypergraph
from .production import Diagnostic, Production

COMPARATORS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


# -- guards ---------------------------------------------------------------


@dataclass(frozen=True)
class Count:
    label: str
    op: str
    value: int

    def holds(self, graph: Hypergraph) -> bool:
        return COMPARATORS[self.op](len(graph.edges_labelled(self.label)), self.value)


@dataclass(frozen=True)
class Exists:
    """Some ``label`` edge has tentacle ``index`` on a node named ``node``."""

    label: str
    index: int
    node: str

    def holds(self, graph: Hypergraph) -> bool:
        return any(
            self.index < len(e.tentacles) and e.tentacles[self.index].name == self.node
            for e in graph.edges_labelled(self.label)
        )


@dataclass(frozen=True)
class Not:
    arg: "Guard"

    def holds(self, graph: Hypergraph) -> bool:
        return not self.arg.holds(graph)


@dataclass(frozen=True)
class And:
    left: "Guard"
    right: "Guard"

    def holds(self, graph: Hypergraph) -> bool:
        return self.left.holds(graph) and self.right.holds(graph)


@dataclass(frozen=True)
class Or:
    left: "Guard"
    right: "Guard"

    def holds(self, graph: Hypergraph) -> bool:
        return self.left.holds(graph) or self.right.holds(graph)


@dataclass(frozen=True)
class Always:
    def holds(self, graph: Hypergraph) -> bool:
        return True


Guard = Union[Count, Exists, Not, And, Or, Always]


# -- rules ------------------------------------------------------------------


@dataclass(frozen=True)
class ByName:
    name: str

    def resolve(self, graph: Hypergraph) -> Edge | None:
        return next((e for e in graph.edges if e.name == self.name), None)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ByOrdinal:
    """The ``ordinal``-th edge labelled ``label`` in edge-id order."""

    label: str
    ordinal: int

    def resolve(self, graph: Hypergraph) -> Edge | None:
        edges = graph.edges_labelled(self.label)
        return edges[self.ordinal] if 0 <= self.ordinal < len(edges) else None

    def __str__(self) -> str:
        return f"{self.label}#{self.ordinal}"


Selector = Union[ByName, ByOrdinal]


@dataclass(frozen=True)
class Fresh:
    """A fresh node in an operation's argument list, optionally named."""

    hint: str | None = None


Arg = Union[int, Fresh]


@dataclass(frozen=True)
class PolicyRule:
    event: str
    guard: Guard
    operation: str
    target: Selector
    args: tuple[Arg, ...] = ()

    def check(self) -> list[Diagnostic]:
        action = gcm.OPERATIONS.get(self.operation)
        if action is None:
            return [Diagnostic("UNKNOWN_OPERATION", f"no adaptation operation {self.operation!r}")]
        if len(self.args) != action.arity:
            return [
                Diagnostic(
                    "ACTION_ARITY_CLASH",
                    f"{self.operation} sends {action.arity} nodes, rule gives {len(self.args)}",
                )
            ]
        bad = [a for a in self.args if isinstance(a, int) and not 0 <= a < gcm.AM.arity]
        if bad:
            return [Diagnostic("BAD_TENTACLE_INDEX", f"manager tentacle {bad[0]} out of range")]
        return []

    def emitter(self, name: str) -> Production:
        spec = [a if isinstance(a, int) else (gcm.NEW, a.hint) for a in self.args]
        return gcm.am_emitter(gcm.OPERATIONS[self.operation], spec, name=name)


@dataclass(frozen=True)
class Event:
    name: str
    payload: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ArmedEmission:
    rule: int
    am_edge: int
    target: int
    emitter: Production

    def fired_in(self, t: Transition) -> bool:
        if (self.am_edge, self.emitter.name) not in t.assignment:
            return False
        return any(s.output_edge == self.am_edge and self.target in s.input_edges for s in t.fired)


@dataclass
class Evaluation:
    emissions: list[ArmedEmission]
    diagnostics: list[Diagnostic]


def evaluate(rules: Sequence[PolicyRule], event: Event, graph: Hypergraph) -> Evaluation:
    """Arm an emission for every rule matching ``event`` whose guard holds,
    in rule order.  Unresolvable targets are reported, not raised."""
    emissions, diags = [], []
    for i, rule in enumerate(rules):
        if rule.event != event.name or not rule.guard.holds(graph):
            continue
        problems = rule.check()
        if problems:
            diags.extend(problems)
            continue
        target = rule.target.resolve(graph)
        if target is None:
            diags.append(Diagnostic("UNRESOLVED_TARGET", f"rule {i}: no edge matches {rule.target}"))
            continue
        if target.label != gcm.F:
            diags.append(Diagnostic("BAD_TARGET", f"rule {i}: {rule.target} is not a component edge"))
            continue
        port = target.tentacles[0]
        am = next((e for e in graph.edges if e.label == gcm.AM and e.tentacles[0] == port), None)
        if am is None:
            diags.append(Diagnostic("NO_MANAGER", f"rule {i}: no manager on port {port} of {rule.target}"))
            continue
        emitter = rule.emitter(f"{rule.operation}_r{i}")
        emissions.append(ArmedEmission(i, am.id, target.id, emitter))
    return Evaluation(emissions, diags)


def armed_steps(
    graph: Hypergraph,
    emissions: Sequence[ArmedEmission],
    registry: Sequence[Production],
    policy: SyncPolicy = SyncPolicy.MILNER,
) -> list[Transition]:
    """Transitions in which an armed emitter synchronises with its target.

    Emissions are tried in order; each emitter is only offered to its own
    manager edge.
    """
    out: list[Transition] = []
    seen = set()
    for em in emissions:
        for t in applicable_steps(graph, registry, policy, extra={em.am_edge: [em.emitter]}):
            if em.fired_in(t) and t.key not in seen:
                seen.add(t.key)
                out.append(t)
    return out


def step_with_policy(
    graph: Hypergraph,
    rules: Sequence[PolicyRule],
    event: Event,
    registry: Sequence[Production],
    policy: SyncPolicy = SyncPolicy.MILNER,
) -> Transition | None:
    """The first transition realising a rule armed by ``event``, or ``None``
    when the assembly is quiescent for it."""
    ev = evaluate(rules, event, graph)
    steps = armed_steps(graph, ev.emissions, registry, policy)
    return steps[0] if steps else None
