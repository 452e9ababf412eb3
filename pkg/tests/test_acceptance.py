"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line
that the terminal summary prints at the end of the run."""

from __future__ import annotations

import itertools
import time

from helpers import (
    VARS, graph_from_edges, iotas, premise_falsified, principalize, random_conditions,
    random_formula, random_iota, random_model, random_sequent, random_sigma, random_tree,
    record, rng_for,
)
from nestedqml import transform as tr
from nestedqml.calculus import CalculusConfig, applicable_instances, check_proof, premises_of
from nestedqml.grammar import (
    BWD, FWD, Extension, bounded_language, build_sigma_system, classify_extension, s4,
)
from nestedqml.reachability import reachable, reachable_oracle
from nestedqml.search import Proved, Refuted, SearchBudget, prove
from nestedqml.semantics import FrameConditions, check_frame, satisfies, satisfies_sequent
from nestedqml.sequent import NestedSequent, fm, fresh_name, singleton
from nestedqml.syntax import (
    And, Atom, Box, Const, Dia, Exists, Forall, NegAtom, Neq, Or, Var, negate, parse_formula,
)


def _prove_all(cases, limit):
    failures, worst = [], 0.0
    for conds, text in cases:
        cfg = CalculusConfig.parse(conds)
        t0 = time.perf_counter()
        res = prove(singleton(parse_formula(text)), cfg)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if not isinstance(res, Proved):
            failures.append(f"{conds or '-'}: {text} -> {type(res).__name__}")
        elif not check_proof(res.proof, cfg):
            failures.append(f"{conds or '-'}: {text} -> kernel rejects: {check_proof(res.proof, cfg)}")
        elif dt >= limit:
            failures.append(f"{conds or '-'}: {text} took {dt:.2f}s")
    return failures, worst


# ----------------------------------------------------------- criterion 1

AXIOMS = [
    ("K", "box (P -> Q) -> (box P -> box Q)"),
    ("K", "box (forall x. P(x) -> R(x,a)) -> (box forall x. P(x)) -> box forall x. R(x,a)"),
    ("UI", "forall y. ((forall x. P(x)) -> P(y))"),
    ("UI", "forall y. ((forall x. R(x,a)) -> R(y,a))"),
    ("COMM", "(forall x. forall y. R(x,y)) -> forall y. forall x. R(x,y)"),
    ("DIST", "(forall x. (P(x) -> Q)) -> ((forall x. P(x)) -> forall x. Q)"),
    ("DIST", "(forall x. (P(x) -> box P(x))) -> ((forall x. P(x)) -> forall x. box P(x))"),
    ("VAQ", "P(y) -> forall x. P(y)"),
    ("VAQ", "box Q -> forall x. box Q"),
    ("REF", "a = a"),
    ("REF", "x = x"),
    ("REPL", "(a = b /\\ P(a)) -> P(b)"),
    ("REPL", "(x = y /\\ R(x,x)) -> R(y,x)"),
    ("REPL", "(a = b /\\ box P(a)) -> box P(b)"),
    ("REPL", "(a = b /\\ forall x. dia R(x,a)) -> forall x. dia R(x,b)"),
    ("ND", "a != b -> box a != b"),
    ("ND", "x != y -> box x != y"),
]


def test_criterion_1_base_axioms():
    failures, worst = _prove_all([("", t) for _, t in AXIOMS], 5.0)
    ok = not failures
    record(1, ok, f"{len(AXIOMS)} axiom instances proved and kernel-checked, slowest {worst:.3f}s"
           if ok else "; ".join(failures))
    assert ok, failures


# ----------------------------------------------------------- criterion 2

CORRESPONDENCE = [
    ("D", "box P -> dia P"),
    ("G(0,2)", "dia dia P -> dia P"),
    ("G(1,0)", "P -> box dia P"),
    ("ID", "(box forall x. P(x)) -> forall x. box P(x)"),
    ("DD", "(forall x. box P(x)) -> box forall x. P(x)"),
    ("CD,ID,DD,NE", "(forall x. P(x)) -> P(a)"),
    ("NE", "(forall x. P(x)) -> exists x. P(x)"),
]


def test_criterion_2_correspondence():
    failures, worst = _prove_all(CORRESPONDENCE, 5.0)
    ok = not failures
    record(2, ok, f"{len(CORRESPONDENCE)} correspondence axioms proved, slowest {worst:.3f}s"
           if ok else "; ".join(failures))
    assert ok, failures


# ----------------------------------------------------------- criterion 3

NEGATIVE = [
    "(forall x. box P(x)) -> box forall x. P(x)",
    "(box forall x. P(x)) -> forall x. box P(x)",
    "box P -> dia P",
    "(forall x. P(x)) -> exists x. P(x)",
    "(forall x. P(x)) -> P(a)",
]


def test_criterion_3_refutations():
    cfg = CalculusConfig.parse("")
    failures, sizes, worst = [], [], 0.0
    for text in NEGATIVE:
        goal = singleton(parse_formula(text))
        t0 = time.perf_counter()
        res = prove(goal, cfg)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if not isinstance(res, Refuted):
            failures.append(f"{text}: {type(res).__name__}")
            continue
        m = res.model
        sizes.append(len(m.worlds))
        if not check_frame(m, cfg.conditions):
            failures.append(f"{text}: frame check failed")
        if satisfies_sequent(m, res.assignment, res.interpretation, goal):
            failures.append(f"{text}: model does not falsify the goal")
        if len(m.worlds) > 4:
            failures.append(f"{text}: {len(m.worlds)} worlds")
        if dt >= 10.0:
            failures.append(f"{text}: {dt:.2f}s")
    ok = not failures
    record(3, ok, f"5 refutations verified, worlds {sizes}, slowest {worst:.3f}s" if ok else "; ".join(failures))
    assert ok, failures


# ------------------------------------------------------- criteria 4 and 5

def _reach_cases(count: int = 1200):
    rng = rng_for("reach")
    for _ in range(count):
        n = rng.randint(1, 6)
        graph = graph_from_edges(n, random_tree(rng, n))
        conds = {(rng.randint(0, 2), rng.randint(0, 2)) for _ in range(rng.randint(0, 2))}
        start = rng.choice((FWD, BWD))
        yield graph, conds, start, f"w{rng.randrange(n)}", f"w{rng.randrange(n)}"


REACH_CASES = list(_reach_cases())


def test_criterion_4_reachability_oracle():
    bad, yes, sat_only = [], 0, 0
    for graph, conds, start, u, w in REACH_CASES:
        system = build_sigma_system(conds)
        oracle = reachable_oracle(graph, system, start, u, w, 8)
        sat = reachable(graph, system, start, u, w)
        yes += oracle
        sat_only += sat and not oracle
        if oracle and not sat:
            bad.append((sorted(conds), start.value, u, w, sorted(graph.edges)))
    ok = not bad
    record(4, ok, f"{len(REACH_CASES)} cases, {yes} oracle-yes all confirmed, "
                  f"{sat_only} saturation-yes beyond the oracle bound" if ok else f"{len(bad)} disagreements")
    assert ok, bad[:5]


def _bounded_class(conds) -> Extension | None:
    system = s4() | build_sigma_system(conds)
    lang = bounded_language(system, FWD, 6, 8)
    every = {s for n in range(7) for s in itertools.product((FWD, BWD), repeat=n)}
    forward = {(FWD,) * n for n in range(7)}
    if lang == every:
        return Extension.S5_EQUIVALENT
    if lang == forward:
        return Extension.S4_EQUIVALENT
    return None


def test_criterion_5_reversal_and_classification():
    bad = []
    for graph, conds, start, u, w in REACH_CASES:
        system = build_sigma_system(conds)
        if reachable(graph, system, start, u, w) != reachable(graph, system, start.converse, w, u):
            bad.append(("reversal", sorted(conds), start.value, u, w))
    pairs = [(n, k) for n in range(3) for k in range(3)]
    subsets = 0
    for r in range(len(pairs) + 1):
        for conds in itertools.combinations(pairs, r):
            subsets += 1
            if classify_extension(conds) != _bounded_class(conds):
                bad.append(("classify", conds))
    ok = not bad
    record(5, ok, f"path reversal on {len(REACH_CASES)} cases, classification on {subsets} condition sets"
           if ok else f"{len(bad)} failures, first {bad[:3]}")
    assert ok, bad[:5]


# ----------------------------------------------------------- criterion 6

def test_criterion_6_formula_interpretation():
    rng = rng_for("fm")
    bad, pairs, checks = [], 0, 0
    while pairs < 500:
        c = random_conditions(rng)
        m = random_model(rng, c)
        g = random_sequent(rng, depth=3, max_children=2, max_formulas=2, formula_depth=2)
        sigma = random_sigma(rng, m)
        phi = fm(g)
        pairs += 1
        for w in m.worlds:
            lhs = all(satisfies_sequent(m, sigma, i, g) for i in iotas(m, g, {g.name: w}))
            rhs = satisfies(m, w, sigma, phi)
            checks += 1
            if lhs != rhs:
                bad.append((str(g), w))
    ok = not bad
    record(6, ok, f"{pairs} (model, sequent) pairs, {checks} root worlds, full agreement"
           if ok else f"{len(bad)} disagreements")
    assert ok, bad[:5]


# ----------------------------------------------------------- criterion 7

def _generated_proofs(count: int):
    """Kernel-valid proofs from two sources: generalized axioms and the prover."""
    rng = rng_for("proofs")
    out = []
    budget = SearchBudget(max_rounds=12, max_sequent_size=120, max_seconds=2.0)
    while len(out) < count:
        conds = random_conditions(rng, max_paths=1)
        cfg = CalculusConfig(conds)
        g = random_sequent(rng, depth=2, max_children=2, max_formulas=1, formula_depth=1)
        at = rng.choice(g.names())
        phi = random_formula(rng, 2)
        if len(out) % 2 == 0:
            p = tr.generalized_axiom(g, at, phi)
        else:
            res = prove(g.add_formula(at, Or(phi, negate(phi))), cfg, budget)
            if not isinstance(res, Proved):
                continue
            p = res.proof
        assert check_proof(p, cfg), check_proof(p, cfg)
        out.append((cfg, p))
    return out


def _invertible_instances(p, cfg):
    g = p.conclusion
    insts = []
    for inst in applicable_instances(g, cfg):
        if inst.rule in ("ax", "ref", "cd"):
            continue
        insts.append(inst)
    return insts


def _hp_checks(rng, cfg, p):
    """Apply every height-preserving transform to ``p``; yield (name, input, output)."""
    g = p.conclusion
    names = g.names()
    at = rng.choice(names)
    phi = random_formula(rng, 2)
    t = rng.choice([Var(v) for v in VARS] + [Const("a")])
    yield "weaken", p, tr.weaken(p, at, phi)
    yield "term_weaken", p, tr.term_weaken(p, at, t)
    yield "ext_weaken", p, tr.ext_weaken(p, at)
    yield "nec", p, tr.nec(p)
    fv = sorted(g.free_vars(), key=lambda v: v.name)
    x = rng.choice(fv) if fv else Var("x")
    yield "subst", p, tr.subst_proof(p, t, x)
    insts = _invertible_instances(p, cfg)
    if insts:
        inst = rng.choice(insts)
        for i in range(len(premises_of(g, inst, cfg))):
            yield f"invert-{inst.rule}", p, tr.invert(p, inst, i)
    comp = g.component(at)
    if comp.formulas:
        f = rng.choice(comp.formulas)
        doubled = tr.weaken(p, at, f)
        yield "contract", doubled, tr.contract(doubled, at, f)
    doubled = tr.term_weaken(tr.term_weaken(p, at, t), at, t)
    yield "term_contract", doubled, tr.term_contract(doubled, at, t)
    kids = [c.name for c in comp.children]
    if kids:
        extra = tr.ext_weaken(p, at)
        new = (set(extra.conclusion.names()) - set(names)).pop()
        yield "ext_contract", extra, tr.ext_contract(extra, at, rng.choice(kids), new)
        child = rng.choice(kids)
        rest = g.remove_child(child)
        from nestedqml.reachability import reach_relation
        rel = reach_relation(rest.prop_graph(), cfg.dia_language)
        targets = [v for v in rest.names() if (at, v) in rel]
        if targets:
            yield "shift", p, tr.shift(p, at, rng.choice(targets), child, cfg)


def _cut_pairs(count: int):
    rng = rng_for("cuts")
    budget = SearchBudget(max_rounds=12, max_sequent_size=150, max_seconds=2.0)
    out = []
    while len(out) < count:
        conds = random_conditions(rng, max_paths=1)
        cfg = CalculusConfig(conds)
        g = random_sequent(rng, depth=2, max_children=2, max_formulas=1, formula_depth=1)
        at = rng.choice(g.names())
        phi = random_formula(rng, 2)
        mode = len(out) % 2
        if mode == 0:
            # valid context, cut formula weakened in and then decomposed at the root
            lit = random_formula(rng, 1)
            base_goal = g.add_formula(at, Or(lit, negate(lit)))
            res = prove(base_goal, cfg, budget)
            if not isinstance(res, Proved):
                continue
            p1 = principalize(tr.weaken(res.proof, at, phi), at, phi, cfg)
            p2 = principalize(tr.weaken(res.proof, at, negate(phi)), at, negate(phi), cfg)
            out.append((cfg, base_goal, at, phi, p1, p2))
        else:
            chi = random_formula(rng, 1)
            ctx = g.add_formula(at, Or(negate(phi), chi), And(phi, negate(chi)))
            r1 = prove(ctx.add_formula(at, phi), cfg, budget)
            r2 = prove(ctx.add_formula(at, negate(phi)), cfg, budget)
            if not (isinstance(r1, Proved) and isinstance(r2, Proved)):
                continue
            out.append((cfg, ctx, at, phi, r1.proof, r2.proof))
    return out


def _ebr_instances():
    """Proofs of A0 -> box(A1 -> ... box(An -> box B)) for n = 0, 1, 2."""
    cfg = CalculusConfig()
    out = []
    for n in range(3):
        for body in ("P(x) \\/ ~P(x)", "box (R(x,a) \\/ ~R(x,a))", "forall y. (x = y \\/ x != y)"):
            ants = [parse_formula(s) for s in ("P(a)", "Q", "dia P(b)")[: n + 1]]
            phi = parse_formula(body)
            for a in reversed(ants):
                phi = Or(negate(a), Box(phi))
            res = prove(singleton(phi), cfg)
            assert isinstance(res, Proved), phi
            out.append((n, res.proof))
    return out


def test_criterion_7_transforms():
    t0 = time.perf_counter()
    rng = rng_for("hp")
    proofs = _generated_proofs(200)
    failures, applied = [], 0
    for cfg, p in proofs:
        for name, src, out in _hp_checks(rng, cfg, p):
            applied += 1
            rep = check_proof(out, cfg)
            if not rep:
                failures.append(f"{name}: {rep}")
            elif out.height > src.height:
                failures.append(f"{name}: height {out.height} > {src.height}")
    ebr = 0
    for n, p in _ebr_instances():
        out = tr.derive_ebr(p, n, Var("x"))
        ebr += 1
        if not check_proof(out, CalculusConfig()):
            failures.append(f"ebr n={n}: {check_proof(out, CalculusConfig())}")
    pairs = _cut_pairs(200)
    principal_cases = 0
    for cfg, g, at, phi, p1, p2 in pairs:
        stats = tr.CutStats()
        try:
            out = tr.eliminate_cut(g, at, phi, p1, p2, cfg, stats)
        except tr.CutMeasureError as exc:
            failures.append(f"cut measure: {exc}")
            continue
        principal_cases += sum(v for k, v in stats.cases.items() if k.startswith("principal"))
        rep = check_proof(out, cfg)
        if not rep:
            failures.append(f"cut: {rep}")
        elif out.conclusion != g:
            failures.append("cut: wrong conclusion")
    dt = time.perf_counter() - t0
    if dt >= 60.0:
        failures.append(f"suite took {dt:.1f}s")
    ok = not failures
    record(7, ok, f"{len(proofs)} proofs, {applied} hp-transform outputs, {ebr} EBR instances, "
                  f"{len(pairs)} cut pairs ({principal_cases} principal reductions), {dt:.1f}s"
           if ok else f"{len(failures)} failures, first: {failures[:3]}")
    assert ok, failures[:10]


# ----------------------------------------------------------- criterion 8

RULE_CONDITIONS = {"dp": ("ID", "DD"), "d": ("D",), "nd": ("NE",), "cd": ("CD",)}


def _rule_config(rng, rule: str) -> CalculusConfig:
    c = random_conditions(rng, max_paths=1)
    extra = RULE_CONDITIONS.get(rule)
    if extra:
        want = rng.choice(extra)
        c = FrameConditions.parse(",".join(filter(None, (str(c), want))))
    return CalculusConfig(c)


def _seed_sequent(rng, rule: str) -> NestedSequent:
    g = random_sequent(rng, depth=2, max_children=2, max_formulas=2, formula_depth=1, vars_=("x", "y"))
    at = rng.choice(g.names())
    t = rng.choice([Var("x"), Var("y"), Const("a")])
    s = rng.choice([Var("x"), Var("y"), Const("b")])
    shapes = {
        "ax": lambda: [Atom("P", (t,)), NegAtom("P", (t,))],
        "or": lambda: [Or(random_formula(rng, 1, vars_=("x", "y")), random_formula(rng, 1, vars_=("x", "y")))],
        "and": lambda: [And(random_formula(rng, 1, vars_=("x", "y")), random_formula(rng, 1, vars_=("x", "y")))],
        "exists": lambda: [Exists("z", random_formula(rng, 1, ["z"], vars_=("x", "y")))],
        "forall": lambda: [Forall("z", random_formula(rng, 1, ["z"], vars_=("x", "y")))],
        "dia": lambda: [Dia(random_formula(rng, 1, vars_=("x", "y")))],
        "box": lambda: [Box(random_formula(rng, 1, vars_=("x", "y")))],
        "rep": lambda: [Neq(t, s), rng.choice([NegAtom("P", (t,)), Neq(t, Const("a")), NegAtom("R", (t, t))])],
        "drep": lambda: [Neq(t, s)],
        "id": lambda: [Neq(t, s)],
    }
    g = g.add_formula(at, *shapes.get(rule, lambda: [])())
    if rule in ("exists", "drep", "dp"):
        g = g.add_term(at, t)
    if rule in ("id", "dp", "dia") and len(g.names()) == 1:
        g = g.add_child(at, NestedSequent(fresh_name(g), (), (random_formula(rng, 1, vars_=("x", "y")),)))
    return g


def test_criterion_8_rule_soundness():
    rng = rng_for("soundness")
    rules = ("ax", "or", "and", "exists", "forall", "dia", "box", "ref", "rep", "drep",
             "id", "dp", "d", "nd", "cd")
    counts: dict[str, int] = {}
    failures = []
    for rule in rules:
        got, attempts = 0, 0
        while got < 50 and attempts < 5000:
            attempts += 1
            cfg = _rule_config(rng, rule)
            g = _seed_sequent(rng, rule)
            insts = [i for i in applicable_instances(g, cfg) if i.rule == rule]
            if not insts:
                continue
            inst = rng.choice(insts)
            prems = premises_of(g, inst, cfg)
            m = random_model(rng, cfg.conditions, max_worlds=3, max_elements=2)
            for _ in range(6):
                sigma = random_sigma(rng, m)
                iota = random_iota(rng, m, g)
                if iota is None:
                    break
                if rule == "ax":
                    # a conclusion of ax is never falsified
                    got += 1
                    if not satisfies_sequent(m, sigma, iota, g):
                        failures.append(f"ax conclusion falsified: {g}")
                    break
                if satisfies_sequent(m, sigma, iota, g):
                    continue
                got += 1
                if not any(premise_falsified(m, sigma, iota, p, g) for p in prems):
                    failures.append(f"{rule}: {inst} on {g!r} under {cfg.conditions}")
                break
        counts[rule] = got
        if got < 50:
            failures.append(f"{rule}: only {got} falsifying triples generated")
    ok = not failures
    others = {r: n for r, n in counts.items() if r != "ax"}
    record(8, ok, f"{sum(others.values())} falsified conclusions across {len(others)} rules "
                  f"(min per rule {min(others.values())}), {counts['ax']} ax conclusions never falsified"
                  if ok else f"{len(failures)} failures, first: {failures[:3]}")
    assert ok, failures[:10]
