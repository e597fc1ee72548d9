"""SHR productions: a decorated lhs edge rewritten into an rhs hypergraph.

A production is written over *formal* names.  The lhs formals are bound to
the tentacle targets of the edge being rewritten; names declared fresh are
bound to newly allocated nodes each time the production is instantiated.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .hypergraph import Edge, Label, Node


class LabelMismatch(Exception):
    pass


class Polarity(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    IDLE = "idle"


@dataclass(frozen=True, order=True)
class Action:
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Condition:
    """An action with polarity and a communicated vector.

    ``comm`` holds formal names inside a :class:`Production` and
    :class:`Node` objects once instantiated.
    """

    polarity: Polarity
    action: Action | None = None
    comm: tuple = ()

    @classmethod
    def input(cls, action: Action, *comm) -> "Condition":
        return cls(Polarity.INPUT, action, tuple(comm))

    @classmethod
    def output(cls, action: Action, *comm) -> "Condition":
        return cls(Polarity.OUTPUT, action, tuple(comm))

    @property
    def is_idle(self) -> bool:
        return self.polarity is Polarity.IDLE

    def __str__(self) -> str:
        if self.is_idle:
            return "idle"
        bang = "!" if self.polarity is Polarity.OUTPUT else ""
        return f"{self.action.name}{bang}<{', '.join(str(c) for c in self.comm)}>"


IDLE = Condition(Polarity.IDLE)


@dataclass(frozen=True)
class Rhs:
    """The rhs schema: edges over formal names plus bare retained nodes."""

    edges: tuple[tuple[Label, tuple[str, ...]], ...] = ()
    nodes: tuple[str, ...] = ()

    def names(self) -> set[str]:
        out = set(self.nodes)
        for _, args in self.edges:
            out.update(args)
        return out


@dataclass(frozen=True)
class Production:
    name: str
    label: Label
    formals: tuple[str, ...]
    conditions: Mapping[int, Condition] = field(default_factory=dict)
    fresh: tuple[str, ...] = ()
    rhs: Rhs = Rhs()
    # display-name hints for fresh nodes (formal -> name)
    hints: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        # normalise: drop explicit idles, freeze mappings into sorted tuples
        conds = {int(i): c for i, c in dict(self.conditions).items() if not c.is_idle}
        object.__setattr__(self, "conditions", _FrozenMap(sorted(conds.items())))
        object.__setattr__(self, "hints", _FrozenMap(sorted(dict(self.hints).items())))
        object.__setattr__(self, "formals", tuple(self.formals))
        object.__setattr__(self, "fresh", tuple(self.fresh))

    def actions(self) -> list[Action]:
        return [c.action for c in self.conditions.values()]

    @property
    def is_idle(self) -> bool:
        return not self.conditions

    def __str__(self) -> str:
        return f"{self.name} for {self.label.name}({', '.join(self.formals)})"


class _FrozenMap(dict):
    """A hashable, read-only dict used for production fields."""

    def __hash__(self):
        return hash(tuple(self.items()))

    def _readonly(self, *a, **k):
        raise TypeError("production mappings are immutable")

    __setitem__ = __delitem__ = update = pop = popitem = clear = setdefault = _readonly  # type: ignore


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: object = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span is not None else ""
        return f"{where}{self.code}: {self.message}"


def validate(production: Production, signatures: Mapping[str, int] | None = None) -> list[Diagnostic]:
    """Check the well-formedness of one production.

    ``signatures`` maps action names to the communication arity already in
    use elsewhere; clashes are reported as ``ACTION_ARITY_CLASH``.
    """
    p = production
    diags: list[Diagnostic] = []

    def report(code, msg):
        diags.append(Diagnostic(code, f"production {p.name!r}: {msg}"))

    if len(p.formals) != p.label.arity:
        report("FORMAL_COUNT_MISMATCH", f"{len(p.formals)} formals for label {p.label}")
    dupes = sorted(n for n in set(p.formals) if p.formals.count(n) > 1)
    if dupes:
        report("DUPLICATE_FORMAL", f"formal names repeated: {', '.join(dupes)}")
    if len(set(p.fresh)) != len(p.fresh):
        report("DUPLICATE_FRESH", "fresh names declared twice")
    overlap = sorted(set(p.fresh) & set(p.formals))
    if overlap:
        report("FRESH_FORMAL_OVERLAP", f"fresh names shadow formals: {', '.join(overlap)}")
    declared = set(p.formals) | set(p.fresh)

    seen: dict[str, int] = {}
    for index, cond in p.conditions.items():
        if not 0 <= index < p.label.arity:
            report("BAD_TENTACLE_INDEX", f"condition on tentacle {index} of {p.label}")
        if cond.action is None:
            report("MISSING_ACTION", f"non-idle condition on tentacle {index} has no action")
            continue
        if len(cond.comm) != cond.action.arity:
            report(
                "COMM_ARITY_MISMATCH",
                f"{cond.action.name} communicates {len(cond.comm)} nodes, expects {cond.action.arity}",
            )
        for name in cond.comm:
            if name not in declared:
                report("UNDECLARED_COMM_NAME", f"{name!r} in {cond.action.name} is neither formal nor fresh")
        known = seen.get(cond.action.name, signatures.get(cond.action.name) if signatures else None)
        if known is not None and known != cond.action.arity:
            report(
                "ACTION_ARITY_CLASH",
                f"action {cond.action.name!r} used with arity {cond.action.arity} and {known}",
            )
        seen.setdefault(cond.action.name, cond.action.arity)

    for label, args in p.rhs.edges:
        if len(args) != label.arity:
            report("RHS_ARITY_MISMATCH", f"rhs edge {label.name} has {len(args)} tentacles, expects {label.arity}")
    for name in sorted(p.rhs.names() - declared):
        report("UNDECLARED_RHS_NAME", f"rhs mentions undeclared name {name!r}")
    for name in sorted(set(p.hints) - set(p.fresh)):
        report("BAD_HINT", f"name hint for non-fresh {name!r}")
    return diags


def validate_all(productions: Iterable[Production]) -> list[Diagnostic]:
    """Validate each production and cross-check action and label signatures
    pairwise across the whole set."""
    prods = list(productions)
    diags: list[Diagnostic] = []
    for p in prods:
        diags.extend(validate(p))
    actions: list[tuple[str, Action]] = [(p.name, a) for p in prods for a in p.actions() if a]
    labels: list[tuple[str, Label]] = [(p.name, p.label) for p in prods]
    labels += [(p.name, lab) for p in prods for lab, _ in p.rhs.edges]
    reported = set()
    for (pa, a), (pb, b) in itertools.combinations(actions, 2):
        if a.name == b.name and a.arity != b.arity and (a.name, pa, pb) not in reported:
            reported.add((a.name, pa, pb))
            diags.append(
                Diagnostic(
                    "ACTION_ARITY_CLASH",
                    f"action {a.name!r} has arity {a.arity} in {pa!r} but {b.arity} in {pb!r}",
                )
            )
    for (pa, a), (pb, b) in itertools.combinations(labels, 2):
        if a.name == b.name and a.arity != b.arity and (a.name, pa, pb) not in reported:
            reported.add((a.name, pa, pb))
            diags.append(
                Diagnostic(
                    "LABEL_ARITY_CLASH",
                    f"label {a.name!r} has arity {a.arity} in {pa!r} but {b.arity} in {pb!r}",
                )
            )
    names = [p.name for p in prods]
    for name in sorted({n for n in names if names.count(n) > 1}):
        diags.append(Diagnostic("DUPLICATE_PRODUCTION", f"production {name!r} defined more than once"))
    return diags


class FreshAllocator:
    """Hands out nodes with consecutive ids starting at ``start``.

    Display names are ``n#k`` with ``k`` counting from zero, unless a hint
    is supplied.  Safe to share between threads.
    """

    def __init__(self, start: int, prefix: str = "n#"):
        self.start = start
        self.prefix = prefix
        self.issued = 0
        self._lock = threading.Lock()

    def __call__(self, hint: str | None = None) -> Node:
        with self._lock:
            k = self.issued
            self.issued += 1
        return Node(self.start + k, hint or f"{self.prefix}{k}")


@dataclass(frozen=True)
class GroundCondition:
    edge_id: int
    index: int
    node: Node
    condition: Condition


@dataclass(frozen=True)
class InstantiatedRule:
    production: Production
    edge: Edge
    binding: Mapping[str, Node]
    fresh: tuple[Node, ...]
    conditions: tuple[GroundCondition, ...]
    rhs_edges: tuple[tuple[Label, tuple[Node, ...]], ...]
    rhs_nodes: tuple[Node, ...]


def instantiate(
    production: Production, edge: Edge, allocate: Callable[[str | None], Node]
) -> InstantiatedRule:
    """Ground ``production`` on ``edge``: formals become the edge's tentacle
    targets and each fresh name a node obtained from ``allocate``."""
    p = production
    if edge.label != p.label:
        raise LabelMismatch(f"production {p.name!r} rewrites {p.label}, edge {edge.id} is {edge.label}")
    binding: dict[str, Node] = dict(zip(p.formals, edge.tentacles))
    fresh = []
    for name in p.fresh:
        node = allocate(p.hints.get(name))
        binding[name] = node
        fresh.append(node)
    conds = tuple(
        GroundCondition(
            edge.id,
            i,
            edge.tentacles[i],
            Condition(c.polarity, c.action, tuple(binding[x] for x in c.comm)),
        )
        for i, c in p.conditions.items()
    )
    rhs_edges = tuple((label, tuple(binding[x] for x in args)) for label, args in p.rhs.edges)
    rhs_nodes = tuple(binding[x] for x in p.rhs.nodes)
    return InstantiatedRule(p, edge, binding, tuple(fresh), conds, rhs_edges, rhs_nodes)


def idle_production(label: Label) -> Production:
    formals = tuple(f"x{i}" for i in range(label.arity))
    return Production(f"idle_{label.name}", label, formals, rhs=Rhs(((label, formals),)))


def make(
    name: str,
    label: Label,
    formals: Sequence[str],
    conditions: Mapping[int, Condition] | None = None,
    fresh: Sequence[str] = (),
    rhs_edges: Sequence[tuple[Label, Sequence[str]]] = (),
    rhs_nodes: Sequence[str] = (),
    hints: Mapping[str, str] | None = None,
) -> Production:
    """Keyword-friendly production constructor."""
    return Production(
        name,
        label,
        tuple(formals),
        conditions or {},
        tuple(fresh),
        Rhs(tuple((lab, tuple(args)) for lab, args in rhs_edges), tuple(rhs_nodes)),
        hints or {},
    )
