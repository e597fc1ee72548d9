"""
An autonomic manager reacting to an event
=========================================

A producer feeds a farm of two workers that share a store.  When
throughput drops the manager moves one worker and replicates the other.
"""
from shr import dsl
from shr.manager import Event, evaluate, step_with_policy
from shr.scenario import ScenarioRunner

spec = dsl.load(next(p for p in dsl.iter_fixture_paths() if p.name == "producer_farm.shr"))
for rule in spec.rules:
    print(dsl.serialize_rule(rule))

# guards are checked against the current shape of the assembly
ev = evaluate(spec.rules, Event("throughput_low"), spec.graph)
print("armed:", [em.emitter.name for em in ev.emissions])

# the first step realising an armed rule
t = step_with_policy(spec.graph, spec.rules, Event("throughput_low"), spec.productions)
print(t.describe())

# the scenario in the file does the whole story and checks it
trace = ScenarioRunner(spec).run()
print(trace.final)
print(trace.to_jsonl())
