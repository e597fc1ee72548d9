"""
Writing assemblies as text
==========================

The text format holds labels, a graph, productions, manager rules and a
scenario.  Errors come back with line and column.
"""
from shr import applicable_steps, dsl

text = """
labels { am/2; f/3; sigma/1; }
graph {
  node g, l, l1, s;
  edge AM: am(g, l1);
  edge F: f(g, l, s);
  edge S: sigma(s);
}
use kill;
use am_emit(kill;) as stop;
"""
spec = dsl.parse(text)
for t in applicable_steps(spec.graph, spec.productions):
    print(t.describe())

# canonical form, stable across runs
print(dsl.serialize(spec))

broken = "labels { f/3; }\ngraph { node a; edge f(a, b); }\n"
_, diags = dsl.check(broken)
for d in diags:
    print(f"{d.span}: {d.code}: {d.message}")
