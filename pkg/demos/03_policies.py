"""
Milner versus broadcast synchronisation
=======================================

Two workers hang off the same manager port.  With point to point
synchronisation the manager moves one of them per step; with broadcast a
single step relocates both.
"""
from shr import SyncPolicy, applicable_steps, gcm
from shr.hypergraph import Hypergraph

g = Hypergraph.build(
    [
        (gcm.AM, ["g", "l0"], "AM"),
        (gcm.F, ["g", "l1", "s"], "W1"),
        (gcm.F, ["g", "l2", "s"], "W2"),
        (gcm.SIGMA, ["s"], "S"),
    ]
)
prods = [gcm.am_emitter(gcm.GO, [0, gcm.NEW]), gcm.go_production()]

for policy in SyncPolicy:
    steps = applicable_steps(g, prods, policy)
    print(policy.value, len(steps), "transition(s)")
    for t in steps:
        print("  ", t.describe())
