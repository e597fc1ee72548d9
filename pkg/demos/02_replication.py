"""
Three ways to replicate a worker
================================

``rep_share`` shares the store, ``rep_fresh`` gives the replica an empty
store and ``copy`` has the store produce a duplicate of its contents.
"""
from shr import applicable_steps, gcm
from shr.hypergraph import Hypergraph

g = Hypergraph.build(
    [(gcm.AM, ["g", "l1"], "AM"), (gcm.F, ["g", "l", "s"], "F"), (gcm.SIGMA, ["s"], "S")]
)

variants = {
    "rep_share": [gcm.am_emitter(gcm.REP, [0, gcm.NEW]), gcm.rep_share_production()],
    "rep_fresh": [gcm.am_emitter(gcm.REP_SIGMA, [0, gcm.NEW]), gcm.rep_fresh_production()],
    "copy": [gcm.am_emitter(gcm.COPY, [0, gcm.NEW, 1]), gcm.copy_production(), gcm.store_rep_production()],
}

for name, prods in variants.items():
    (t,) = applicable_steps(g, prods)
    workers = t.result.edges_labelled("f")
    stores = {w.tentacles[2].name for w in workers}
    print(f"{name:9s} workers={len(workers)} stores={len(t.result.edges_labelled('sigma'))} "
          f"store nodes used={sorted(stores)}")

# copy is a three party step: the manager talks to f on g, f talks to its store on s
(t,) = applicable_steps(g, variants["copy"])
for sync in t.fired:
    print(" ", sync.action, "at", sync.node.name)
