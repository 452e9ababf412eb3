"""Two readings of the domain-propagation rule.

Run:  python demos/04_dp_modes.py

With increasing domains and the Euclidean-style condition G(1,1), the
"literal" dp language lets a term climb back up a bwd edge.  That
proves the Barcan formula, yet a two-world model satisfying both
conditions falsifies it.  The default "star" reading only propagates
along concatenations of fwd-derivable paths and refutes the formula.
"""

from nestedqml import CalculusConfig, Model, Proved, check_frame, check_proof, parse_formula, prove
from nestedqml.semantics import falsifiable_on
from nestedqml.sequent import singleton

goal = singleton(parse_formula("(forall x. box P(x)) -> box forall x. P(x)"))
for mode in ("literal", "star"):
    cfg = CalculusConfig.parse("ID,G(1,1)", dp_mode=mode)
    res = prove(goal, cfg)
    verdict = "proved" if isinstance(res, Proved) else type(res).__name__.lower()
    extra = f", kernel: {check_proof(res.proof, cfg)}" if isinstance(res, Proved) else ""
    print(f"dp_mode={mode:8} {verdict}{extra}")

m = Model(("w", "v"), frozenset({("w", "v"), ("v", "v")}), ("o",),
          {"w": set(), "v": {"o"}}, {"w": {}, "v": {}}, {})
print("model: w R v, v R v, D_w = {}, D_v = {o}")
print("frame conditions hold:", dict(check_frame(m, CalculusConfig.parse("ID,G(1,1)").conditions).results))
print("falsifying (assignment, interpretation):", falsifiable_on(m, goal))
