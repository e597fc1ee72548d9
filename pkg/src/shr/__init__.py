"""Synchronised hyperedge replacement for autonomic component assemblies."""
from .engine import (
    ExistingNodeFusion,
    StaleTransition,
    SyncPolicy,
    Trace,
    Transition,
    applicable_steps,
    apply,
    check_node,
    collect_conditions,
    run,
    unify,
)
from .hypergraph import ArityMismatch, Edge, Hypergraph, Label, Node, UnknownNode, is_isomorphic, to_dot
from .production import Action, Condition, Polarity, Production, idle_production, instantiate, validate, validate_all

from . import dsl, gcm, manager

__all__ = [
    "Action",
    "ArityMismatch",
    "Condition",
    "Edge",
    "ExistingNodeFusion",
    "Hypergraph",
    "Label",
    "Node",
    "Polarity",
    "Production",
    "StaleTransition",
    "SyncPolicy",
    "Trace",
    "Transition",
    "UnknownNode",
    "applicable_steps",
    "apply",
    "check_node",
    "collect_conditions",
    "dsl",
    "gcm",
    "idle_production",
    "instantiate",
    "is_isomorphic",
    "manager",
    "run",
    "to_dot",
    "unify",
    "validate",
    "validate_all",
]

__version__ = "0.1.0"
