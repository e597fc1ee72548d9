import random
import string
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shr import dsl, gcm
from shr.dsl import ApplyStep, AssertGuard, AssertIso, DslError, Inject, RunSteps
from shr.hypergraph import Hypergraph, is_isomorphic
from shr.manager import ByName, ByOrdinal, Count, Exists, Fresh, Not
from shr.production import Polarity

from helpers import two_store_graph, fixture_text, migrated_graph, migration_graph

GOLDEN = Path(__file__).parent / "golden"
FIXTURE_PATHS = sorted(dsl.iter_fixture_paths())


def codes(text):
    return [d.code for d in dsl.check(text)[1]]


def test_migration_fixture():
    spec = dsl.parse(fixture_text("migration.shr"))
    assert len(spec.graph.nodes) == 4 and len(spec.graph.edges) == 3
    assert spec.graph == migration_graph()
    assert {p.name for p in spec.productions} == {"start", "emit_start"}
    assert isinstance(spec.scenario[0], ApplyStep)
    assert isinstance(spec.scenario[-1], AssertIso)
    assert is_isomorphic(spec.scenario[-1].graph, migrated_graph())


def test_two_stores_fixture():
    assert is_isomorphic(dsl.parse(fixture_text("two_stores.shr")).graph, two_store_graph())


def test_empty_input():
    spec, diags = dsl.check("")
    assert diags == []
    assert spec.graph.nodes == () and spec.productions == () and spec.scenario == ()
    assert dsl.serialize(spec) == ""
    assert dsl.check("  // only a comment\n")[1] == []


@pytest.mark.parametrize("path", FIXTURE_PATHS, ids=lambda p: p.name)
def test_round_trip(path):
    first = dsl.parse(path.read_text(encoding="utf-8"))
    text = dsl.serialize(first)
    second = dsl.parse(text)
    assert second == first
    assert dsl.serialize(second) == text


@pytest.mark.parametrize("path", FIXTURE_PATHS, ids=lambda p: p.name)
def test_fixture_validates(path):
    assert dsl.check(path.read_text(encoding="utf-8"))[1] == []


def test_serialization_is_byte_stable():
    text = fixture_text("producer_farm.shr")
    outs = {dsl.serialize(dsl.parse(text)) for _ in range(5)}
    assert len(outs) == 1
    assert next(iter(outs)).endswith("\n")


def test_library_golden():
    spec = dsl.parse("use go, start, rep_share, rep_fresh, copy, store_rep, kill;")
    assert dsl.serialize(spec) == (GOLDEN / "library.shr").read_text(encoding="utf-8")
    assert set(spec.productions) == set(gcm.library())


def test_library_text_matches_builtins():
    text = (GOLDEN / "library.shr").read_text(encoding="utf-8")
    assert set(dsl.parse(text).productions) == set(gcm.library())


def test_handwritten_production():
    spec = dsl.parse(
        """
        labels { f/3; }
        production go for f(g, l, s) {
          new g2, l2 as Away;
          on 0: go(g2, l2);
          rhs { edge f(g2, l2, s); node g, l; }
        }
        """
    )
    (p,) = spec.productions
    assert p.conditions[0].polarity is Polarity.INPUT
    assert p.hints == {"l2": "Away"}
    assert p.rhs.nodes == ("g", "l")


def test_outputs_and_store_action():
    spec = dsl.parse(
        """
        labels { sigma/1; am/2; }
        production s for sigma(x) { new y; on 0: rep@store(y); rhs { edge sigma(x); edge sigma(y); } }
        production e for am(a, b) { on 0: kill!(); rhs { edge am(a, b); } }
        """
    )
    e, s = spec.productions  # sorted by name
    assert s.conditions[0].action == gcm.REP_STORE
    assert e.conditions[0].polarity is Polarity.OUTPUT


def test_rules_and_scenario():
    spec = dsl.parse(fixture_text("producer_farm.shr"))
    r1, r2 = spec.rules
    assert r1.target == ByName("W1") and r1.args == (0, Fresh("L7"))
    assert r1.guard == Exists("f", 1, "L2")
    assert r2.guard == Count("f", "<", 3)
    kinds = [type(s) for s in spec.scenario]
    assert kinds[:3] == [AssertGuard, Inject, ApplyStep]
    text = dsl.serialize(spec)
    assert "go(target W1; 0, new L7)" in text


def test_scenario_forms():
    spec = dsl.parse(
        """
        labels { f/3; }
        rule { when e if not count(f) == 0 then kill(target f#1); }
        scenario { inject e(rate = low); run; run 3; assert not count(f) > 2; }
        """
    )
    (rule,) = spec.rules
    assert rule.target == ByOrdinal("f", 1)
    assert isinstance(rule.guard, Not)
    inject, run_all, run3, check = spec.scenario
    assert inject.event.payload == {"rate": "low"}
    assert isinstance(run_all, RunSteps) and run_all.limit is None and run3.limit == 3
    assert dsl.parse(dsl.serialize(spec)) == spec


@pytest.mark.parametrize(
    "text, code",
    [
        ("graph { node a; edge f(a); }", "UNKNOWN_LABEL"),
        ("labels { f/1; f/2; }", "LABEL_ARITY_CLASH"),
        ("labels { f/1; } graph { node a, a; }", "DUPLICATE_NODE"),
        ("labels { f/1; } graph { edge f(b); }", "UNKNOWN_NODE"),
        ("labels { f/1; } graph { node a; edge E: f(a); edge E: f(a); }", "DUPLICATE_EDGE"),
        ("labels { f/2; } graph { node a; edge f(a); }", "ARITY_MISMATCH"),
        ("use teleport;", "UNKNOWN_LIBRARY"),
        ("use am_emit(fly; 0) as x;", "UNKNOWN_ACTION"),
        ("use am_emit(go; 0) as x;", "ACTION_ARITY_CLASH"),
        ("graph { node a }", "SYNTAX"),
        ("graph { node a; } $", "BAD_CHARACTER"),
        ("graph { } graph { }", "DUPLICATE_SECTION"),
        ("labels { f/1; } production p for f(x) { on 0: a(q); rhs { edge f(x); } }", "UNDECLARED_COMM_NAME"),
        ("labels { f/1; } production p for f(x) { on 0: a(); on 0: b(); rhs { } }", "DUPLICATE_CONDITION"),
        ("rule { when e if " + "(" * 100 + "count(f) == 1" + ")" * 100 + " then kill(target W); }", "TOO_DEEP"),
    ],
)
def test_error_codes(text, code):
    spec, diags = dsl.check(text)
    assert spec is None
    assert code in [d.code for d in diags]
    for d in diags:
        assert d.span is not None and d.span.line >= 1 and d.span.column >= 1
        assert 0 <= d.span.offset <= len(text)


def test_spans_point_at_the_problem():
    text = "labels { f/3; }\ngraph {\n  node a;\n  edge f(a, a, zz);\n}\n"
    (d,) = dsl.check(text)[1]
    assert d.code == "UNKNOWN_NODE"
    assert (d.span.line, d.span.column) == (4, 16)
    assert text[d.span.offset:].startswith("zz")


def test_recovery_reports_several_errors():
    text = "labels { f/3; }\ngraph { node a; edge f(a); edge g(a, a, a); node 1; }\nuse nothing;\n"
    got = codes(text)
    assert {"ARITY_MISMATCH", "UNKNOWN_LABEL", "SYNTAX", "UNKNOWN_LIBRARY"} <= set(got)


def test_error_cap():
    got = codes("graph { " + "node 1; " * 1000 + "}")
    assert 1 < len(got) <= dsl.MAX_ERRORS + 1


def test_parse_raises_dsl_error():
    with pytest.raises(DslError) as info:
        dsl.parse("use teleport;")
    assert info.value.diagnostics[0].code == "UNKNOWN_LIBRARY"
    assert "UNKNOWN_LIBRARY" in str(info.value)


def test_serializer_sanitizes_and_dedups_names():
    g = Hypergraph.build([(gcm.F, ["n#1", "l", "n#1 "])], nodes=["weird name"])
    text = dsl.serialize_graph(g)
    spec = dsl.parse("labels { f/3; }\n" + text)
    assert is_isomorphic(spec.graph, g)


def test_load(tmp_path):
    p = tmp_path / "x.shr"
    p.write_text(fixture_text("kill.shr"), encoding="utf-8")
    assert dsl.load(p) == dsl.parse(fixture_text("kill.shr"))


ALPHABET = string.ascii_letters[:8] + string.digits[:3] + " \n{}();:,!@#/=<>_'$-"
TOKENS = ["labels", "graph", "node", "edge", "production", "for", "new", "on", "rhs", "use", "rule",
          "when", "if", "then", "target", "scenario", "inject", "apply", "run", "assert", "iso",
          "count", "exists", "not", "and", "or", "am_emit", "as", "f", "g", "0", "1", "{", "}", "(",
          ")", ";", ":", ",", "!", "@", "==", "<", "//", "f/3", "\n"]


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=ALPHABET, max_size=80))
def test_fuzz_characters(text):
    spec, diags = dsl.check(text)
    assert (spec is None) == bool(diags)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=40))
def test_fuzz_tokens(words):
    spec, diags = dsl.check(" ".join(words))
    for d in diags:
        assert d.span is not None


@pytest.mark.parametrize("seed", range(5))
def test_fuzz_mutated_fixtures(seed):
    rng = random.Random(seed)
    sources = [p.read_text(encoding="utf-8") for p in FIXTURE_PATHS]
    for _ in range(40):
        text = list(rng.choice(sources))
        for _ in range(rng.randint(1, 5)):
            i = rng.randrange(len(text))
            op = rng.random()
            if op < 0.4:
                del text[i]
            elif op < 0.8:
                text.insert(i, rng.choice(ALPHABET))
            else:
                text[i] = rng.choice(ALPHABET)
        spec, diags = dsl.check("".join(text))
        if spec is not None:
            # anything that parses also survives a round trip
            assert dsl.parse(dsl.serialize(spec)) == spec
