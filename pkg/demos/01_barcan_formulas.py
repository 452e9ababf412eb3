"""Which domain conditions make the Barcan formula and its converse provable?

Run:  python demos/01_barcan_formulas.py

For each frame-condition set we search for a proof; when the search
saturates instead, we print the counter-model it extracted and confirm
that the model meets the conditions and falsifies the formula.
"""

from nestedqml import CalculusConfig, Proved, Refuted, check_frame, check_proof, parse_formula, prove
from nestedqml.semantics import satisfies_sequent
from nestedqml.sequent import singleton

FORMULAS = {
    "BF": "(forall x. box P(x)) -> box forall x. P(x)",
    "CBF": "(box forall x. P(x)) -> forall x. box P(x)",
}

for label, text in FORMULAS.items():
    goal = singleton(parse_formula(text))
    print(f"== {label}: {text}")
    for conds in ("", "ID", "DD", "ID,DD"):
        cfg = CalculusConfig.parse(conds)
        res = prove(goal, cfg)
        name = conds or "(none)"
        if isinstance(res, Proved):
            print(f"  {name:7} proved, height {res.proof.height}, kernel: {check_proof(res.proof, cfg)}")
        elif isinstance(res, Refuted):
            m = res.model
            ok = bool(check_frame(m, cfg.conditions))
            falsified = not satisfies_sequent(m, res.assignment, res.interpretation, goal)
            doms = {w: sorted(d) for w, d in m.domains.items()}
            print(f"  {name:7} refuted: worlds {list(m.worlds)}, R {sorted(m.relation)}, domains {doms}"
                  f" (frame ok: {ok}, falsified: {falsified})")
        else:
            print(f"  {name:7} unknown: {res.reason}")

print()
cfg = CalculusConfig.parse("DD")
res = prove(singleton(parse_formula(FORMULAS["BF"])), cfg)
print("The BF derivation with decreasing domains; dp carries the eigenvariable to the root:")
print(res.proof.pretty())
