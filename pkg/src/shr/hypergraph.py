"""Immutable hypergraphs with labelled edges and ordered tentacles.

Nodes and edges carry integer ids drawn from per-graph monotone counters;
display names are cosmetic and need not be unique.  Every mutating
operation returns a new :class:`Hypergraph`.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class HypergraphError(Exception):
    pass


class ArityMismatch(HypergraphError):
    pass


class UnknownNode(HypergraphError):
    pass


@dataclass(frozen=True, order=True)
class Node:
    id: int
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.name or f"_{self.id}"


@dataclass(frozen=True, order=True)
class Label:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for label {self.name!r}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Edge:
    id: int
    label: Label
    tentacles: tuple[Node, ...]
    name: str = ""

    def __str__(self) -> str:
        args = ", ".join(str(n) for n in self.tentacles)
        return f"{self.name or self.id}: {self.label.name}({args})"


class Hypergraph:
    """A set of nodes plus a set of hyperedges over them.

    Instances are treated as values: equality is structural (ids, names,
    labels and tentacles), and the id counters are not part of it.
    """

    __slots__ = ("_nodes", "_edges", "_next_node", "_next_edge", "_hash")

    def __init__(
        self,
        nodes: Iterable[Node] = (),
        edges: Iterable[Edge] = (),
        next_node: int | None = None,
        next_edge: int | None = None,
    ):
        node_map = {n.id: n for n in nodes}
        edge_map: dict[int, Edge] = {}
        for e in edges:
            if e.id in edge_map:
                raise HypergraphError(f"duplicate edge id {e.id}")
            if len(e.tentacles) != e.label.arity:
                raise ArityMismatch(
                    f"edge {e.id} has {len(e.tentacles)} tentacles, label {e.label} expects {e.label.arity}"
                )
            for n in e.tentacles:
                if n.id not in node_map:
                    raise UnknownNode(f"edge {e.id} targets unknown node {n!r}")
            # tentacles share the graph's node objects (and so their names)
            edge_map[e.id] = Edge(e.id, e.label, tuple(node_map[n.id] for n in e.tentacles), e.name)
        self._nodes = dict(sorted(node_map.items()))
        self._edges = dict(sorted(edge_map.items()))
        self._next_node = max([next_node or 0, *(i + 1 for i in node_map)])
        self._next_edge = max([next_edge or 0, *(i + 1 for i in edge_map)])
        self._hash = None

    # -- construction -------------------------------------------------

    @classmethod
    def build(
        cls,
        edges: Sequence[tuple[Label, Sequence[str]] | tuple[Label, Sequence[str], str]],
        nodes: Sequence[str] = (),
    ) -> "Hypergraph":
        """Build a graph from display names, creating each named node once.

        ``nodes`` are created first, in order; names first seen in ``edges``
        follow.  An optional third tuple item names the edge.
        """
        by_name: dict[str, Node] = {}
        node_list: list[Node] = []

        def get(name: str) -> Node:
            if name not in by_name:
                by_name[name] = Node(len(node_list), name)
                node_list.append(by_name[name])
            return by_name[name]

        for name in nodes:
            get(name)
        edge_list = []
        for i, spec in enumerate(edges):
            label, names = spec[0], spec[1]
            ename = spec[2] if len(spec) > 2 else ""
            edge_list.append(Edge(i, label, tuple(get(n) for n in names), ename))
        return cls(node_list, edge_list)

    def add_node(self, name: str = "") -> tuple["Hypergraph", Node]:
        node = Node(self._next_node, name)
        g = Hypergraph(
            [*self._nodes.values(), node], self._edges.values(), self._next_node + 1, self._next_edge
        )
        return g, node

    def add_edge(
        self, label: Label, tentacles: Sequence[Node], name: str = ""
    ) -> tuple["Hypergraph", int]:
        if len(tentacles) != label.arity:
            raise ArityMismatch(f"{label} given {len(tentacles)} tentacles")
        for n in tentacles:
            if n.id not in self._nodes:
                raise UnknownNode(f"no node {n!r} in graph")
        eid = self._next_edge
        edge = Edge(eid, label, tuple(tentacles), name)
        g = Hypergraph(self._nodes.values(), [*self._edges.values(), edge], self._next_node, eid + 1)
        return g, eid

    def remove_edges(self, edge_ids: Iterable[int]) -> "Hypergraph":
        drop = set(edge_ids)
        return Hypergraph(
            self._nodes.values(),
            (e for e in self._edges.values() if e.id not in drop),
            self._next_node,
            self._next_edge,
        )

    # -- queries --------------------------------------------------------

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes.values())

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges.values())

    @property
    def next_node_id(self) -> int:
        return self._next_node

    @property
    def next_edge_id(self) -> int:
        return self._next_edge

    def node(self, node_id: int) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id}") from None

    def edge(self, edge_id: int) -> Edge:
        return self._edges[edge_id]

    def has_node(self, node: Node) -> bool:
        return node.id in self._nodes

    def nodes_named(self, name: str) -> list[Node]:
        return [n for n in self._nodes.values() if n.name == name]

    def edges_labelled(self, label: str) -> list[Edge]:
        return [e for e in self._edges.values() if e.label.name == label]

    def labels(self) -> set[Label]:
        return {e.label for e in self._edges.values()}

    def attached(self, node: Node) -> list[tuple[int, int]]:
        """Every ``(edge_id, tentacle_index)`` whose tentacle targets ``node``."""
        if not self.has_node(node):
            raise UnknownNode(f"no node {node!r} in graph")
        return [
            (e.id, i)
            for e in self._edges.values()
            for i, n in enumerate(e.tentacles)
            if n.id == node.id
        ]

    def attachment_index(self) -> dict[int, list[tuple[int, int]]]:
        """``attached`` for every node at once, keyed by node id."""
        index: dict[int, list[tuple[int, int]]] = {i: [] for i in self._nodes}
        for e in self._edges.values():
            for i, n in enumerate(e.tentacles):
                index[n.id].append((e.id, i))
        return index

    def isolated(self) -> list[Node]:
        touched = {n.id for e in self._edges.values() for n in e.tentacles}
        return [n for i, n in self._nodes.items() if i not in touched]

    def label_counts(self) -> Counter:
        return Counter(e.label.name for e in self._edges.values())

    # -- transformation -------------------------------------------------

    def apply_substitution(self, subst: Mapping[Node, Node]) -> "Hypergraph":
        """Redirect tentacles through ``subst`` (chains resolved) and drop
        the substituted nodes.  Representatives missing from the graph are
        added."""
        resolved = resolve_substitution(subst)
        if not resolved:
            return self
        nodes = {n.id: n for n in self._nodes.values() if n not in resolved}
        for rep in resolved.values():
            nodes.setdefault(rep.id, rep)
        edges = [
            Edge(e.id, e.label, tuple(resolved.get(n, n) for n in e.tentacles), e.name)
            for e in self._edges.values()
        ]
        return Hypergraph(nodes.values(), edges, self._next_node, self._next_edge)

    # -- comparison -----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self._edges == other._edges
            and [(n.id, n.name) for n in self._nodes.values()]
            == [(n.id, n.name) for n in other._nodes.values()]
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple((n.id, n.name) for n in self._nodes.values()), tuple(self._edges.values())))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(str(e) for e in self._edges.values())
        iso = ", ".join(str(n) for n in self.isolated())
        return f"Hypergraph({body}{' | isolated: ' + iso if iso else ''})"

    def is_isomorphic(self, other: "Hypergraph") -> bool:
        return is_isomorphic(self, other)

    def to_dot(self, name: str = "G") -> str:
        return to_dot(self, name)


def resolve_substitution(subst: Mapping[Node, Node]) -> dict[Node, Node]:
    """Close a substitution under chaining and drop identity entries."""
    out = {}
    for src in subst:
        seen = {src}
        dst = subst[src]
        while dst in subst and subst[dst] != dst:
            if dst in seen:
                raise HypergraphError(f"cyclic substitution through {dst!r}")
            seen.add(dst)
            dst = subst[dst]
        if dst != src:
            out[src] = dst
    return out


def _signature(graph: Hypergraph) -> dict[int, tuple]:
    sig: dict[int, list] = defaultdict(list)
    for e in graph.edges:
        for i, n in enumerate(e.tentacles):
            sig[n.id].append((e.label.name, e.label.arity, i))
    return {nid: tuple(sorted(sig.get(nid, ()))) for nid in (n.id for n in graph.nodes)}


def is_isomorphic(a: Hypergraph, b: Hypergraph) -> bool:
    """Backtracking isomorphism test, pruned by labels and node signatures.

    Display names are ignored.  Suitable for graphs of a few dozen nodes.
    """
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    if a.label_counts() != b.label_counts() or {e.label for e in a.edges} != {e.label for e in b.edges}:
        return False
    sig_a, sig_b = _signature(a), _signature(b)
    if Counter(sig_a.values()) != Counter(sig_b.values()):
        return False

    b_by_label: dict[Label, list[Edge]] = defaultdict(list)
    for e in b.edges:
        b_by_label[e.label].append(e)
    # rarest labels first keeps the branching factor low early on
    order = sorted(a.edges, key=lambda e: (len(b_by_label[e.label]), e.label, e.id))

    nmap: dict[int, int] = {}
    rmap: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        ea = order[k]
        for eb in b_by_label[ea.label]:
            if eb.id in used:
                continue
            added = []
            ok = True
            for na, nb in zip(ea.tentacles, eb.tentacles):
                m = nmap.get(na.id)
                if m is None:
                    if nb.id in rmap or sig_a[na.id] != sig_b[nb.id]:
                        ok = False
                        break
                    nmap[na.id] = nb.id
                    rmap[nb.id] = na.id
                    added.append(na.id)
                elif m != nb.id:
                    ok = False
                    break
            if ok:
                used.add(eb.id)
                if extend(k + 1):
                    return True
                used.discard(eb.id)
            for nid in added:
                del rmap[nmap.pop(nid)]
        return False

    # isolated nodes match freely once counts agree (checked via signatures)
    return extend(0)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(graph: Hypergraph, name: str = "G") -> str:
    """Render as an undirected DOT graph: nodes are points, edges are boxes
    linked to their tentacle targets with the tentacle index as label."""
    lines = [f"graph {name} {{"]
    for n in graph.nodes:
        lines.append(f'  n{n.id} [shape=point, xlabel="{_dot_escape(str(n))}"];')
    for e in graph.edges:
        lines.append(f'  e{e.id} [shape=box, label="{_dot_escape(e.label.name)}"];')
    for e in graph.edges:
        for i, n in enumerate(e.tentacles):
            lines.append(f'  e{e.id} -- n{n.id} [label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
