"""Graph generators and brute-force oracles shared by the test modules.

The oracles deliberately avoid the engine's own helpers (attachment index,
pre-screening, result construction) so that they check it independently.
"""
from __future__ import annotations

import random
from pathlib import Path

from shr import gcm
from shr.engine import ExistingNodeFusion, check_node, unify
from shr.hypergraph import Edge, Hypergraph, Label, Node
from shr.production import FreshAllocator, instantiate

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "shr" / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def migration_graph() -> Hypergraph:
    return Hypergraph.build(
        [
            (gcm.AM, ["g", "l1"], "AM"),
            (gcm.F, ["g", "l", "s"], "F"),
            (gcm.SIGMA, ["s"], "S"),
        ],
        nodes=["g", "l", "l1", "s"],
    )


def migrated_graph() -> Hypergraph:
    return Hypergraph.build(
        [
            (gcm.AM, ["g", "l1"]),
            (gcm.F, ["g", "l1", "s1"]),
            (gcm.SIGMA, ["s"]),
            (gcm.SIGMA, ["s1"]),
        ],
        nodes=["g", "l", "l1", "s", "s1"],
    )


def two_store_graph() -> Hypergraph:
    return Hypergraph.build(
        [
            (gcm.AM, ["g", "l'"]),
            (gcm.F, ["g", "l'", "s'"]),
            (gcm.SIGMA, ["s"]),
            (gcm.SIGMA, ["s'"]),
        ],
        nodes=["g", "l", "l'", "s", "s'"],
    )


def gcm_registry():
    """Library productions plus one emitter per manager operation."""
    emitters = [
        gcm.am_emitter(gcm.GO, [0, gcm.NEW], name="emit_go"),
        gcm.am_emitter(gcm.START, [0, 1, gcm.NEW], name="emit_start"),
        gcm.am_emitter(gcm.REP, [0, gcm.NEW], name="emit_rep"),
        gcm.am_emitter(gcm.REP_SIGMA, [gcm.NEW, gcm.NEW], name="emit_rep_sigma"),
        gcm.am_emitter(gcm.COPY, [0, gcm.NEW, 1], name="emit_copy"),
        gcm.am_emitter(gcm.KILL, [], name="emit_kill"),
    ]
    return gcm.library() + emitters


def random_graph(rng: random.Random, max_edges: int = 4, max_nodes: int = 4,
                 labels=(gcm.AM, gcm.F, gcm.SIGMA)) -> Hypergraph:
    n_nodes = rng.randint(1, max_nodes)
    nodes = [Node(i, f"v{i}") for i in range(n_nodes)]
    edges = []
    for i in range(rng.randint(0, max_edges)):
        lab = rng.choice(labels)
        edges.append(Edge(i, lab, tuple(rng.choice(nodes) for _ in range(lab.arity)), f"E{i}"))
    return Hypergraph(nodes, edges)


def manager_graph(rng: random.Random, max_workers: int = 3) -> Hypergraph:
    """A manager plus workers on its port, each with a store; the shape the
    adaptation productions are written for."""
    edges = [(gcm.AM, ["g", "lam"], "AM")]
    for k in range(rng.randint(1, max_workers)):
        store = rng.choice(["s0", f"s{k}"])
        edges.append((gcm.F, ["g", f"l{k}", store], f"W{k}"))
    stores = sorted({e[1][2] for e in edges[1:]})
    for s in stores:
        if rng.random() < 0.8:
            edges.append((gcm.SIGMA, [s], f"S_{s}"))
    return Hypergraph.build(edges)


def gcm_context(rng: random.Random, max_edges: int = 4) -> Hypergraph:
    """Up to ``max_edges`` edges drawn around a few shared names, biased so
    that managers, workers and stores often meet on the same nodes."""
    names = ["g", "h", "l", "m", "s", "t"][: rng.randint(2, 6)]
    pick = lambda: rng.choice(names)  # noqa: E731
    port = lambda: "g" if rng.random() < 0.7 else pick()  # noqa: E731
    edges = []
    for i in range(rng.randint(1, max_edges)):
        lab = gcm.AM if i == 0 and rng.random() < 0.7 else rng.choice([gcm.AM, gcm.F, gcm.F, gcm.SIGMA])
        if lab == gcm.SIGMA:
            targets = ["s" if "s" in names and rng.random() < 0.6 else pick()]
        else:
            targets = [port()] + [pick() for _ in range(lab.arity - 1)]
        edges.append((lab, targets, f"E{i}"))
    return Hypergraph.build(edges, nodes=names)


# -- oracles -----------------------------------------------------------------


def all_assignments(edges, options):
    """Every way of giving each edge ``None`` or one of its options, by
    plain recursion."""
    if not edges:
        yield {}
        return
    head, rest = edges[0], edges[1:]
    for tail in all_assignments(rest, options):
        yield tail
        for p in options(head):
            yield {head.id: p, **tail}


def brute_force_steps(graph: Hypergraph, productions, policy):
    """Reference enumeration: ``{assignment key: (fusion, result)}``."""
    edges = list(graph.edges)

    def options(e):
        return [p for p in productions if p.label == e.label]

    found = {}
    for assignment in all_assignments(edges, options):
        if not assignment:
            continue
        alloc = FreshAllocator(graph.next_node_id)
        rules = {eid: instantiate(assignment[eid], graph.edge(eid), alloc) for eid in sorted(assignment)}
        equations = []
        ok = True
        for node in graph.nodes:
            conds = [
                gc
                for eid in sorted(rules)
                for gc in rules[eid].conditions
                if gc.node.id == node.id
            ]
            attached = sum(1 for e in edges for t in e.tentacles if t.id == node.id)
            res = check_node(conds, policy, attached)
            if not res.ok:
                ok = False
                break
            equations.extend(res.equations)
        if not ok:
            continue
        try:
            fusion = unify(equations, graph.nodes)
        except ExistingNodeFusion:
            continue
        key = tuple((eid, assignment[eid].name) for eid in sorted(assignment))
        found[key] = (dict(fusion), rebuild(graph, rules, fusion))
    return found


def rebuild(graph: Hypergraph, rules, fusion) -> Hypergraph:
    """Replace edges by their rhs using only public graph operations, then
    fuse with ``apply_substitution``."""
    g = graph.remove_edges(rules)
    fresh = [n for r in rules.values() for n in r.fresh]
    g = Hypergraph([*g.nodes, *fresh], g.edges, g.next_node_id, g.next_edge_id)
    keep = set()
    for eid in sorted(rules):
        for label, targets in rules[eid].rhs_edges:
            g, _ = g.add_edge(label, targets)
            keep.update(targets)
        keep.update(rules[eid].rhs_nodes)
    g = g.apply_substitution(fusion)
    keep = {fusion.get(n, n) for n in keep}
    fresh_ids = {n.id for n in fresh}
    nodes = [n for n in g.nodes if n.id not in fresh_ids or n in keep]
    return Hypergraph(nodes, g.edges)


def closure_partition(equations, nodes):
    """Equivalence classes by repeated set merging (no union-find)."""
    classes = [{n} for n in nodes]
    for a, b in equations:
        ca = next(c for c in classes if a in c)
        cb = next(c for c in classes if b in c)
        if ca is not cb:
            classes.remove(cb)
            ca |= cb
    return classes


def permuted(graph: Hypergraph, perm: dict[int, int]) -> Hypergraph:
    nodes = {n.id: Node(perm[n.id], f"p{perm[n.id]}") for n in graph.nodes}
    edges = [Edge(e.id, e.label, tuple(nodes[t.id] for t in e.tentacles)) for e in graph.edges]
    return Hypergraph(nodes.values(), edges)


L2 = Label("bin", 2)
