"""
Moving a component to a new location
====================================

A manager sits on port ``g`` at location ``l1``.  It tells the component
``f`` running at ``l`` to restart next to it with a brand new store.
"""
from shr import applicable_steps, gcm, to_dot
from shr.hypergraph import Hypergraph

# the starting assembly: a manager, one component and its store
g = Hypergraph.build(
    [(gcm.AM, ["g", "l1"], "AM"), (gcm.F, ["g", "l", "s"], "F"), (gcm.SIGMA, ["s"], "S")],
    nodes=["g", "l", "l1", "s"],
)
print("before:", g)

# the manager sends start_sigma(g, l1, new) and the component accepts it
emit = gcm.am_emitter(gcm.START, [0, 1, gcm.NEW])
steps = applicable_steps(g, [emit, gcm.start_production()])
print(len(steps), "transition")

t = steps[0]
print(t.describe())
print("after: ", t.result)

# the old location and the old store are left behind
print("isolated:", [n.name for n in t.result.isolated()])
print(to_dot(t.result))
