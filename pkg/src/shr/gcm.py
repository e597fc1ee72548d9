"""Adaptation productions for GCM-style autonomic components.

Tentacle roles are fixed library-wide:

* ``f``     -- (manager port, location, store)
* ``am``    -- (manager port, location)
* ``sigma`` -- (store)

The replication signal sent by a manager and the duplication signal a
component sends to its store would both naturally be called ``rep``, but
they carry 2 and 1 nodes respectively; the store signal is therefore
called ``rep_store`` (written ``rep@store`` in the text format).
"""
from __future__ import annotations

from typing import Sequence

from .hypergraph import ArityMismatch, Label
from .production import Action, Condition, Production, make

F = Label("f", 3)
AM = Label("am", 2)
SIGMA = Label("sigma", 1)
LABELS = (AM, F, SIGMA)

GO = Action("go", 2)
START = Action("start_sigma", 3)
REP = Action("rep", 2)
REP_SIGMA = Action("rep_sigma", 2)
COPY = Action("copy", 3)
KILL = Action("kill", 0)
REP_STORE = Action("rep_store", 1)
ACTIONS = {a.name: a for a in (GO, START, REP, REP_SIGMA, COPY, KILL, REP_STORE)}

#: adaptation operation -> signal the manager emits for it
OPERATIONS = {
    "go": GO,
    "start": START,
    "rep_share": REP,
    "rep_fresh": REP_SIGMA,
    "copy": COPY,
    "kill": KILL,
}

_LHS = ("g", "l", "s")


def go_production() -> Production:
    """Migrate to a communicated location, keeping the store."""
    return make(
        "go",
        F,
        _LHS,
        {0: Condition.input(GO, "g2", "l2")},
        fresh=("g2", "l2"),
        rhs_edges=[(F, ("g2", "l2", "s"))],
        rhs_nodes=("g", "l"),
    )


def start_production() -> Production:
    """Migrate and restart on a brand-new store."""
    return make(
        "start",
        F,
        _LHS,
        {0: Condition.input(START, "g2", "l2", "s2")},
        fresh=("g2", "l2", "s2"),
        rhs_edges=[(F, ("g2", "l2", "s2")), (SIGMA, ("s2",))],
        rhs_nodes=("g", "l", "s"),
    )


def rep_share_production() -> Production:
    """Add a replica that shares the original's store."""
    return make(
        "rep_share",
        F,
        _LHS,
        {0: Condition.input(REP, "g2", "l2")},
        fresh=("g2", "l2"),
        rhs_edges=[(F, ("g", "l", "s")), (F, ("g2", "l2", "s"))],
    )


def rep_fresh_production() -> Production:
    """Add a replica with its own new store.  The new store node is not
    communicated."""
    return make(
        "rep_fresh",
        F,
        _LHS,
        {0: Condition.input(REP_SIGMA, "g2", "l2")},
        fresh=("g2", "l2", "s2"),
        rhs_edges=[(F, ("g", "l", "s")), (F, ("g2", "l2", "s2")), (SIGMA, ("s2",))],
    )


def copy_production() -> Production:
    """Add a replica working on a copy of the store.

    Synchronises on two tentacles at once: ``copy`` from the manager and
    ``rep_store!`` towards the store, sharing the fresh store node.
    """
    return make(
        "copy",
        F,
        _LHS,
        {0: Condition.input(COPY, "g2", "s2", "l2"), 2: Condition.output(REP_STORE, "s2")},
        fresh=("g2", "s2", "l2"),
        rhs_edges=[(F, ("g", "l", "s")), (F, ("g2", "l2", "s2"))],
    )


def store_rep_production() -> Production:
    return make(
        "store_rep",
        SIGMA,
        ("s",),
        {0: Condition.input(REP_STORE, "s2")},
        fresh=("s2",),
        rhs_edges=[(SIGMA, ("s",)), (SIGMA, ("s2",))],
    )


def kill_production() -> Production:
    return make(
        "kill",
        F,
        _LHS,
        {0: Condition.input(KILL)},
        rhs_nodes=_LHS,
    )


#: fresh marker for :func:`am_emitter` communication specs
NEW = "new"


def _comm_parts(comm_spec):
    for item in comm_spec:
        if isinstance(item, int):
            yield item, None
        elif item == NEW or item is None:
            yield None, None
        elif isinstance(item, tuple) and item[0] == NEW:
            yield None, item[1]
        else:
            raise ValueError(f"bad communication spec entry {item!r}")


def am_emitter(action: Action, comm_spec: Sequence, name: str | None = None) -> Production:
    """A manager production emitting ``action!`` on its port tentacle.

    ``comm_spec`` entries are tentacle indices of the manager edge (0 for
    its port, 1 for its location), ``NEW`` for a fresh node, or
    ``(NEW, "L7")`` for a fresh node with a display name.
    """
    if len(comm_spec) != action.arity:
        raise ArityMismatch(f"{action} needs {action.arity} communicated nodes, got {len(comm_spec)}")
    formals = ("x", "y")
    comm, fresh, hints = [], [], {}
    for k, (index, hint) in enumerate(_comm_parts(comm_spec)):
        if index is None:
            fname = f"n{k}"
            fresh.append(fname)
            comm.append(fname)
            if hint:
                hints[fname] = hint
        else:
            if not 0 <= index < AM.arity:
                raise ValueError(f"manager tentacle index {index} out of range")
            comm.append(formals[index])
    if name is None:
        name = f"emit_{action.name}"
    return make(
        name,
        AM,
        formals,
        {0: Condition.output(action, *comm)},
        fresh=fresh,
        rhs_edges=[(AM, formals)],
        hints=hints,
    )


LIBRARY = {
    "go": go_production,
    "start": start_production,
    "rep_share": rep_share_production,
    "rep_fresh": rep_fresh_production,
    "copy": copy_production,
    "kill": kill_production,
    "store_rep": store_rep_production,
}


def library() -> list[Production]:
    """All component and store productions (no manager emitters)."""
    return [make_() for make_ in LIBRARY.values()]
