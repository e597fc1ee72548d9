import itertools
import random

import pytest

from shr import gcm
from shr.engine import applicable_steps
from shr.hypergraph import Hypergraph
from shr.manager import (
    Always,
    And,
    ByName,
    ByOrdinal,
    Count,
    Event,
    Exists,
    Fresh,
    Not,
    Or,
    PolicyRule,
    armed_steps,
    evaluate,
    step_with_policy,
)

from helpers import manager_graph

F, AM, SIGMA = gcm.F, gcm.AM, gcm.SIGMA


def farm():
    return Hypergraph.build(
        [
            (AM, ["g", "L5"], "AM"),
            (F, ["g", "L2", "s"], "W1"),
            (F, ["g", "L3", "s"], "W2"),
            (SIGMA, ["s"], "S"),
        ]
    )


def with_workers(n):
    return Hypergraph.build([(AM, ["g", "m"])] + [(F, ["g", f"l{i}", "s"]) for i in range(n)])


@pytest.mark.parametrize("n", range(6))
def test_guard_truth_table(n):
    g = with_workers(n)
    expected = {"==": n == 2, "!=": n != 2, "<": n < 2, "<=": n <= 2, ">": n > 2, ">=": n >= 2}
    for op, want in expected.items():
        assert Count("f", op, 2).holds(g) is want
    lo, hi = Count("f", ">=", 1), Count("f", "<", 4)
    assert And(lo, hi).holds(g) is (1 <= n < 4)
    assert Or(Not(lo), Not(hi)).holds(g) is not (1 <= n < 4)
    assert Always().holds(g)


def test_exists_guard():
    g = farm()
    assert Exists("f", 1, "L2").holds(g)
    assert not Exists("f", 1, "L5").holds(g)
    assert not Exists("f", 7, "L2").holds(g)


def test_selectors():
    g = farm()
    assert ByName("W2").resolve(g).tentacles[1].name == "L3"
    assert ByOrdinal("f", 0).resolve(g).name == "W1"
    assert ByOrdinal("f", 2).resolve(g) is None
    assert ByName("nope").resolve(g) is None
    assert str(ByOrdinal("f", 1)) == "f#1"


def test_throughput_low_rule_arms_emitter():
    rule = PolicyRule("throughput_low", Count("f", "<", 3), "rep_share", ByName("W2"), (0, Fresh("L8")))
    ev = evaluate([rule], Event("throughput_low"), farm())
    assert ev.diagnostics == []
    (em,) = ev.emissions
    g = farm()
    assert em.am_edge == g.edges_labelled("am")[0].id
    assert em.target == ByName("W2").resolve(g).id
    assert em.emitter.conditions[0].action == gcm.REP


def test_no_matching_rule():
    rule = PolicyRule("throughput_low", Always(), "go", ByName("W1"), (0, Fresh()))
    assert evaluate([rule], Event("overload"), farm()).emissions == []
    guarded = PolicyRule("throughput_low", Count("f", ">", 5), "go", ByName("W1"), (0, Fresh()))
    assert evaluate([guarded], Event("throughput_low"), farm()).emissions == []


def test_rule_diagnostics():
    rules = [
        PolicyRule("e", Always(), "teleport", ByName("W1")),
        PolicyRule("e", Always(), "go", ByName("W1"), (0,)),
        PolicyRule("e", Always(), "go", ByName("W1"), (0, 5)),
        PolicyRule("e", Always(), "go", ByName("ghost"), (0, Fresh())),
        PolicyRule("e", Always(), "go", ByName("S"), (0, Fresh())),
    ]
    ev = evaluate(rules, Event("e"), farm())
    assert ev.emissions == []
    assert [d.code for d in ev.diagnostics] == [
        "UNKNOWN_OPERATION",
        "ACTION_ARITY_CLASH",
        "BAD_TENTACLE_INDEX",
        "UNRESOLVED_TARGET",
        "BAD_TARGET",
    ]


def test_no_manager_on_port():
    g = Hypergraph.build([(AM, ["h", "m"]), (F, ["g", "l", "s"], "W")])
    ev = evaluate([PolicyRule("e", Always(), "kill", ByName("W"))], Event("e"), g)
    assert [d.code for d in ev.diagnostics] == ["NO_MANAGER"]


def test_go_moves_w1_to_l7():
    rule = PolicyRule("throughput_low", Exists("f", 1, "L2"), "go", ByName("W1"), (0, Fresh("L7")))
    t = step_with_policy(farm(), [rule], Event("throughput_low"), gcm.library())
    assert t is not None
    w1 = ByName("W1").resolve(t.result)
    assert [n.name for n in w1.tentacles] == ["g", "L7", "s"]
    assert ByName("W2").resolve(t.result) == ByName("W2").resolve(farm())
    assert any(n.name == "L2" for n in t.result.isolated())


def test_failing_guard_gives_none():
    rule = PolicyRule("throughput_low", Count("f", ">=", 3), "go", ByName("W1"), (0, Fresh("L7")))
    assert step_with_policy(farm(), [rule], Event("throughput_low"), gcm.library()) is None


def test_armed_target_without_matching_production():
    rule = PolicyRule("e", Always(), "go", ByName("W1"), (0, Fresh()))
    assert step_with_policy(farm(), [rule], Event("e"), [gcm.kill_production()]) is None


def test_several_rules_arm_in_order():
    rules = [
        PolicyRule("e", Always(), "go", ByName("W1"), (0, Fresh("L7"))),
        PolicyRule("e", Always(), "rep_share", ByName("W2"), (0, Fresh("L8"))),
    ]
    ev = evaluate(rules, Event("e"), farm())
    assert [em.rule for em in ev.emissions] == [0, 1]
    steps = armed_steps(farm(), ev.emissions, gcm.library())
    assert steps
    assert ev.emissions[0].fired_in(steps[0])


@pytest.mark.parametrize("seed", range(15))
def test_armed_steps_are_unrestricted_steps(seed):
    rng = random.Random(seed)
    g = manager_graph(rng)
    ops = ["go", "start", "rep_share", "rep_fresh", "kill"]
    workers = g.edges_labelled("f")
    rules = []
    for op in ops:
        arity = gcm.OPERATIONS[op].arity
        args = tuple(rng.choice([0, 1, Fresh()]) for _ in range(arity))
        rules.append(PolicyRule("e", Always(), op, ByName(rng.choice(workers).name), args))
    ev = evaluate(rules, Event("e"), g)
    assert ev.diagnostics == []
    registry = gcm.library()
    armed = armed_steps(g, ev.emissions, registry)
    for em in ev.emissions:
        full = {t.key for t in applicable_steps(g, registry + [em.emitter])}
        for t in armed:
            if em.fired_in(t):
                assert t.key in full
    assert len({t.key for t in armed}) == len(armed)


def test_evaluate_is_pure():
    g = farm()
    before = (g, list(g.edges), list(g.nodes))
    rules = [PolicyRule("e", Always(), op, ByName("W1"), (0,) * gcm.OPERATIONS[op].arity)
             for op in ["go", "rep_share", "kill"]]
    first = evaluate(rules, Event("e"), g)
    second = evaluate(rules, Event("e"), g)
    assert first == second
    assert (g, list(g.edges), list(g.nodes)) == before


def test_every_operation_has_a_library_action():
    for op, action in gcm.OPERATIONS.items():
        assert action in gcm.ACTIONS.values()
    for a, b in itertools.combinations(gcm.OPERATIONS.values(), 2):
        if a.name == b.name:
            assert a.arity == b.arity
