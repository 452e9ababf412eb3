"""Grammar-driven reachability in a propagation graph.

Run:  python demos/02_reachability.py

A nested sequent with a root w and children v and u is turned into a
graph with fwd edges down the tree and bwd edges back up.  Whether a
formula may travel from one component to another depends on the strings
the path-condition grammar can derive from fwd.
"""

from nestedqml import FWD, parse_sequent, reachable
from nestedqml.grammar import build_sigma_system, classify_extension, format_string
from nestedqml.reachability import walk_strings

g = parse_sequent("w: sig{x, y}; Psi, [v: exists x. P(x), P(y)], [u: sig{a}; dia (Phi \\/ Psi), Phi \\/ Psi]")
graph = g.prop_graph()
print("vertices:", graph.vertices)
print("edges:   ", sorted((a, c.value, b) for a, c, b in graph.edges))
print("labels:  ", {k: [t.name for t in v] for k, v in graph.labels.items()})
print()

for conds in [set(), {(0, 0)}, {(0, 2)}, {(1, 1)}]:
    sys_ = build_sigma_system(conds)
    pairs = [(a, b) for a in graph.vertices for b in graph.vertices if reachable(graph, sys_, FWD, a, b)]
    label = ", ".join(f"G{c}" for c in sorted(conds)) or "no path conditions"
    print(f"{label:20} {classify_extension(conds).value}-like; fwd-reachable pairs: {pairs}")

print()
print("walk strings from v to u (length <= 4):",
      sorted(format_string(s) for s in walk_strings(graph, "v", "u", 4)))
print("Under G(1,1) the rule fwd -> bwd fwd derives 'bwd fwd' from 'fwd', so dia at v reaches u.")
