"""Execute the scenario section of a spec file."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .dsl import ApplyStep, AssertGuard, AssertIso, Inject, RunSteps, SpecFile
from .engine import SyncPolicy, Trace, Transition, applicable_steps
from .hypergraph import Hypergraph, is_isomorphic
from .manager import ArmedEmission, armed_steps, evaluate

log = logging.getLogger(__name__)


class ScenarioFailure(Exception):
    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"scenario step {step + 1}: {message}")


@dataclass
class ScenarioRunner:
    spec: SpecFile
    policy: SyncPolicy = SyncPolicy.MILNER
    max_steps: int = 1000
    on_step: Callable[[int, Transition], None] | None = None
    graph: Hypergraph = field(init=False)
    trace: Trace = field(init=False)
    pending: list[ArmedEmission] = field(init=False, default_factory=list)
    diagnostics: list = field(init=False, default_factory=list)

    def __post_init__(self):
        self.graph = self.spec.graph
        self.trace = Trace(self.graph)

    def current_steps(self) -> list[Transition]:
        """Transitions offered to ``apply``: those realising armed rules if
        any are pending, otherwise every step of the spec's productions."""
        if self.pending:
            return armed_steps(self.graph, self.pending, self.spec.productions, self.policy)
        return applicable_steps(self.graph, self.spec.productions, self.policy)

    def _take(self, t: Transition) -> None:
        self.trace.append(t)
        self.graph = t.result
        self.pending = [em for em in self.pending if not em.fired_in(t)]
        # surviving emissions must still point at live edges
        live = {e.id for e in self.graph.edges}
        self.pending = [em for em in self.pending if em.am_edge in live and em.target in live]
        if self.on_step:
            self.on_step(len(self.trace), t)

    @property
    def budget(self) -> int:
        return self.max_steps - len(self.trace)

    def run(self) -> Trace:
        """Run every step; raises :class:`ScenarioFailure` on the first
        failed assertion.  Stops quietly once ``max_steps`` are applied."""
        for k, step in enumerate(self.spec.scenario):
            if isinstance(step, Inject):
                ev = evaluate(self.spec.rules, step.event, self.graph)
                self.diagnostics.extend(ev.diagnostics)
                for d in ev.diagnostics:
                    log.warning("%s", d)
                self.pending.extend(ev.emissions)
            elif isinstance(step, ApplyStep):
                if self.budget <= 0:
                    log.info("step budget exhausted before scenario step %d", k + 1)
                    break
                steps = self.current_steps()
                if not 0 <= step.index < len(steps):
                    raise ScenarioFailure(k, f"no transition #{step.index} ({len(steps)} available)")
                self._take(steps[step.index])
            elif isinstance(step, RunSteps):
                limit = self.budget if step.limit is None else min(step.limit, self.budget)
                for _ in range(limit):
                    steps = self.current_steps()
                    if not steps:
                        break
                    self._take(steps[0])
                if self.budget <= 0:
                    break
            elif isinstance(step, AssertGuard):
                if not step.guard.holds(self.graph):
                    raise ScenarioFailure(k, "assertion failed")
            elif isinstance(step, AssertIso):
                if not is_isomorphic(self.graph, step.graph):
                    raise ScenarioFailure(k, "graph is not isomorphic to the expected one")
        return self.trace
