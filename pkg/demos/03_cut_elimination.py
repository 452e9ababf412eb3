"""Eliminating a cut on a boxed formula.

Run:  python demos/03_cut_elimination.py

We take a provable context, weaken in box P(a) on one side and its
negation dia ~P(a) on the other, decompose both so the cut formula is
principal, and let the elimination procedure reduce the cut.  The
recorded (formula length, height sum) measures show the lexicographic
descent; the output is re-checked by the kernel.
"""

from nestedqml import CalculusConfig, RuleInstance, check_proof, negate, parse_formula, parse_sequent, prove
from nestedqml import transform as tr
from nestedqml.calculus import Proof

cfg = CalculusConfig()
g = parse_sequent("w0: Q \\/ ~Q, [w1: S]")
base = prove(g, cfg).proof
phi = parse_formula("box P(a)")


def boxed_first(p: Proof) -> Proof:
    """Make the last rule decompose box P(a): box, then dia into the new child."""
    inst = RuleInstance("box", "w0", phi, child="w2")
    return Proof(p.conclusion, inst, (tr.invert(p, inst),))


def dia_first(p: Proof) -> Proof:
    inst = RuleInstance("dia", "w0", negate(phi), target="w1")
    return Proof(p.conclusion, inst, (tr.weaken(p, "w1", negate(phi).body),))


p1 = boxed_first(tr.weaken(base, "w0", phi))
p2 = dia_first(tr.weaken(base, "w0", negate(phi)))
print("left premise :", p1.conclusion, f"(height {p1.height}, last rule {p1.instance.rule})")
print("right premise:", p2.conclusion, f"(height {p2.height}, last rule {p2.instance.rule})")

stats = tr.CutStats()
out = tr.eliminate_cut(g, "w0", phi, p1, p2, cfg, stats)
print("recursive calls:", stats.calls)
print("measures       :", stats.measures)
print("cases          :", stats.cases)
print("result         :", out.conclusion, f"height {out.height}, kernel: {check_proof(out, cfg)}")
print("rules used     :", sorted(out.rules_used()))
