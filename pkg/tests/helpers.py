"""Random generators and oracles shared by the test-suite."""

from __future__ import annotations

import itertools
import os
import random
from typing import Iterator

from nestedqml.calculus import CalculusConfig, Proof, RuleInstance, premises_of
from nestedqml.reachability import PropGraph, reach_relation
from nestedqml.semantics import Assignment, FrameConditions, Model, satisfies_sequent
from nestedqml.sequent import NestedSequent, fresh_name, singleton
from nestedqml.syntax import (
    And, Atom, Box, Const, Dia, Eq, Exists, Forall, Formula, NegAtom, Neq, Or, Term, Var,
    fresh_var, free_vars, parse_formula, substitute,
)
from nestedqml import transform as tr

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str) -> None:
    """Remember one acceptance verdict; the terminal summary prints them all."""
    ACCEPTANCE[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


SEED = int(os.environ.get("NESTEDQML_SEED", "20240917"))

PREDS = {"P": 1, "Q": 0, "R": 2}
CONSTS = ("a", "b")
VARS = ("x", "y", "z")
ELEMENTS = ("o0", "o1", "o2")


def rng_for(tag: str) -> random.Random:
    return random.Random(f"{SEED}:{tag}")


# ----------------------------------------------------------------- frames

def random_conditions(rng: random.Random, max_paths: int = 2) -> FrameConditions:
    paths = {(rng.randint(0, 2), rng.randint(0, 2)) for _ in range(rng.randint(0, max_paths))}
    return FrameConditions(
        serial=rng.random() < 0.3, paths=frozenset(paths),
        increasing=rng.random() < 0.3, decreasing=rng.random() < 0.3,
        classical=rng.random() < 0.1, nonempty=rng.random() < 0.3)


def _compose(rel: set, n: int, worlds) -> set:
    cur = {(w, w) for w in worlds}
    for _ in range(n):
        cur = {(u, v) for (u, m) in cur for (m2, v) in rel if m == m2}
    return cur


def close_relation(rel: set, worlds, c: FrameConditions, rng: random.Random) -> set:
    rel = set(rel)
    while True:
        before = len(rel)
        for n, k in c.paths:
            rn, rk = _compose(rel, n, worlds), _compose(rel, k, worlds)
            rel |= {(u, v) for (w, u) in rn for (w2, v) in rk if w == w2}
        if c.serial:
            for w in worlds:
                if not any(a == w for a, _ in rel):
                    rel.add((w, rng.choice(worlds)))
        if len(rel) == before:
            return rel


def random_model(rng: random.Random, c: FrameConditions, max_worlds: int = 3,
                 max_elements: int = 3, preds: dict[str, int] = PREDS,
                 consts=CONSTS) -> Model:
    """A random model repaired until it meets ``c``."""
    worlds = [f"m{i}" for i in range(rng.randint(1, max_worlds))]
    universe = list(ELEMENTS[:rng.randint(1, max_elements)])
    rel = {(u, v) for u in worlds for v in worlds if rng.random() < 0.35}
    rel = close_relation(rel, worlds, c, rng)
    dom = {w: {o for o in universe if rng.random() < 0.5} for w in worlds}
    if c.nonempty:
        for w in worlds:
            if not dom[w]:
                dom[w].add(rng.choice(universe))
    if c.classical:
        dom = {w: set(universe) for w in worlds}
    changed = True
    while changed:
        changed = False
        for u, v in rel:
            if c.increasing and not dom[u] <= dom[v]:
                dom[v] |= dom[u]
                changed = True
            if c.decreasing and not dom[v] <= dom[u]:
                dom[u] |= dom[v]
                changed = True
    predicates = {}
    for w in worlds:
        predicates[w] = {}
        for p, ar in preds.items():
            tuples = [t for t in itertools.product(universe, repeat=ar) if rng.random() < 0.5]
            predicates[w][p] = tuples
    constants = {a: rng.choice(universe) for a in consts}
    return Model(tuple(worlds), frozenset(rel), tuple(universe), dom, predicates, constants)


# --------------------------------------------------------------- formulas

def random_term(rng: random.Random, bound: list[str] = (), vars_: tuple[str, ...] = VARS) -> Term:
    pool = [Var(v) for v in vars_] + [Var(v) for v in bound] + [Const(a) for a in CONSTS]
    return rng.choice(pool)


def random_literal(rng: random.Random, bound: list[str] = (), vars_=VARS) -> Formula:
    kind = rng.randrange(4)
    if kind < 2:
        p = rng.choice(sorted(PREDS))
        args = tuple(random_term(rng, bound, vars_) for _ in range(PREDS[p]))
        return Atom(p, args) if kind == 0 else NegAtom(p, args)
    l, r = random_term(rng, bound, vars_), random_term(rng, bound, vars_)
    return Eq(l, r) if kind == 2 else Neq(l, r)


def random_formula(rng: random.Random, depth: int = 3, bound: list[str] | None = None,
                   vars_=VARS) -> Formula:
    bound = list(bound or [])
    if depth <= 0 or rng.random() < 0.25:
        return random_literal(rng, bound, vars_)
    k = rng.randrange(6)
    if k == 0:
        return Or(random_formula(rng, depth - 1, bound, vars_), random_formula(rng, depth - 1, bound, vars_))
    if k == 1:
        return And(random_formula(rng, depth - 1, bound, vars_), random_formula(rng, depth - 1, bound, vars_))
    if k in (2, 3):
        v = rng.choice(("u", "v", "w") + tuple(vars_))
        body = random_formula(rng, depth - 1, bound + [v], vars_)
        return Exists(v, body) if k == 2 else Forall(v, body)
    body = random_formula(rng, depth - 1, bound, vars_)
    return Dia(body) if k == 4 else Box(body)


def random_sequent(rng: random.Random, depth: int = 3, max_children: int = 2,
                   max_formulas: int = 2, formula_depth: int = 2, names: list[str] | None = None,
                   vars_=VARS) -> NestedSequent:
    names = names if names is not None else []
    name = f"w{len(names)}"
    names.append(name)
    terms = tuple(random_term(rng, (), vars_) for _ in range(rng.randint(0, 2)))
    formulas = tuple(random_formula(rng, formula_depth, None, vars_) for _ in range(rng.randint(0, max_formulas)))
    kids = []
    if depth > 1:
        for _ in range(rng.randint(0, max_children)):
            kids.append(random_sequent(rng, depth - 1, max_children, max_formulas, formula_depth, names, vars_))
    return NestedSequent(name, terms, formulas, tuple(kids))


# ----------------------------------------------------- semantic oracles

def iotas(m: Model, g: NestedSequent, fixed: dict[str, str] | None = None) -> Iterator[dict[str, str]]:
    """All interpretations of ``g``'s names mapping tree edges into R (extending ``fixed``)."""
    fixed = dict(fixed or {})
    order = g.names()
    parent = {w: u for u, w in g.tree_edges()}

    def rec(i: int, cur: dict[str, str]) -> Iterator[dict[str, str]]:
        if i == len(order):
            yield dict(cur)
            return
        n = order[i]
        if n in fixed:
            if n in parent and (cur[parent[n]], fixed[n]) not in m.relation:
                return
            cands = [fixed[n]]
        else:
            cands = m.successors(cur[parent[n]]) if n in parent else list(m.worlds)
        for w in cands:
            cur[n] = w
            yield from rec(i + 1, cur)
        cur.pop(n, None)

    yield from rec(0, {})


def random_sigma(rng: random.Random, m: Model, names=VARS + ("u", "v", "w")) -> Assignment:
    return Assignment({v: rng.choice(m.universe) for v in names}, m.universe[0])


def random_iota(rng: random.Random, m: Model, g: NestedSequent) -> dict[str, str] | None:
    """A random interpretation respecting tree edges, or None if none exists along the way."""
    parent = {w: u for u, w in g.tree_edges()}
    out: dict[str, str] = {}
    for n in g.names():
        cands = m.successors(out[parent[n]]) if n in parent else list(m.worlds)
        if not cands:
            return None
        out[n] = rng.choice(cands)
    return out


def premise_falsified(m: Model, sigma: Assignment, iota: dict[str, str], prem: NestedSequent,
                      concl: NestedSequent) -> bool:
    """Is ``prem`` falsified by some extension of (sigma, iota) to its new variables and names?"""
    new_vars = sorted({v.name for v in prem.free_vars()} - {v.name for v in concl.free_vars()})
    for vals in itertools.product(m.universe, repeat=len(new_vars)):
        s2 = sigma
        for v, o in zip(new_vars, vals):
            s2 = s2.updated(v, o)
        for i2 in iotas(m, prem, iota):
            if not satisfies_sequent(m, s2, i2, prem):
                return True
    return False


# ------------------------------------------------- proof-shape helpers

def principalize(p: Proof, at: str, phi: Formula, cfg: CalculusConfig, deep: bool = True) -> Proof:
    """Rebuild ``p`` so that its last rule decomposes the occurrence ``phi`` at ``at``."""
    g = p.conclusion
    rec = (lambda q, a, f: principalize(q, a, f, cfg, deep)) if deep else (lambda q, a, f: q)
    if isinstance(phi, Or):
        inst = RuleInstance("or", at, phi)
        q = rec(rec(tr.invert(p, inst), at, phi.left), at, phi.right)
        return Proof(g, inst, (q,))
    if isinstance(phi, And):
        inst = RuleInstance("and", at, phi)
        return Proof(g, inst, tuple(rec(tr.invert(p, inst, i), at, part)
                                    for i, part in enumerate((phi.left, phi.right))))
    if isinstance(phi, Forall):
        y = fresh_var(p.vars_used())
        inst = RuleInstance("forall", at, phi, fresh=y)
        return Proof(g, inst, (rec(tr.invert(p, inst), at, substitute(phi.body, y, phi.var)),))
    if isinstance(phi, Box):
        c = fresh_name(p.names_used())
        inst = RuleInstance("box", at, phi, child=c)
        return Proof(g, inst, (rec(tr.invert(p, inst), c, phi.body),))
    if isinstance(phi, Dia):
        rel = reach_relation(g.prop_graph(), cfg.dia_language)
        targets = [u for u in g.names() if (at, u) in rel]
        if not targets:
            return p
        inst = RuleInstance("dia", at, phi, target=targets[-1])
        return Proof(g, inst, (tr.weaken(p, targets[-1], phi.body),))
    if isinstance(phi, Exists):
        sig = g.component(at).terms
        if not sig:
            return p
        inst = RuleInstance("exists", at, phi, term=sig[0])
        return Proof(g, inst, (tr.weaken(p, at, substitute(phi.body, sig[0], phi.var)),))
    return p


def graph_from_edges(n: int, tree: list[tuple[int, int]], labels=None) -> PropGraph:
    names = [f"w{i}" for i in range(n)]
    return PropGraph.from_tree_edges(names, [(names[a], names[b]) for a, b in tree], labels or {})


def random_tree(rng: random.Random, n: int) -> list[tuple[int, int]]:
    return [(rng.randrange(i), i) for i in range(1, n)]


def fv_names(phi: Formula) -> set[str]:
    return {v.name for v in free_vars(phi)}


# ------------------------------------------------- hand-built proofs

def linear_proof(goal: NestedSequent, steps: list[RuleInstance], cfg: CalculusConfig) -> Proof:
    """Apply single-premise ``steps`` bottom-up; the last one must close the branch."""
    seqs = [goal]
    for inst in steps[:-1]:
        (nxt,) = premises_of(seqs[-1], inst, cfg)
        seqs.append(nxt)
    p = Proof(seqs[-1], steps[-1], ())
    for g, inst in zip(reversed(seqs[:-1]), reversed(steps[:-1])):
        p = Proof(g, inst, (p,))
    return p


BF_TEXT = "(forall x. box P(x)) -> box forall x. P(x)"
CBF_TEXT = "(box forall x. P(x)) -> forall x. box P(x)"


def bf_proof(cfg: CalculusConfig) -> Proof:
    """The Barcan formula derived with dp moving the eigenvariable down to the root."""
    phi = parse_formula(BF_TEXT)
    ex, bx = phi.left, phi.right
    y = Var("y")
    steps = [
        RuleInstance("or", "w0", phi),
        RuleInstance("box", "w0", bx, child="w1"),
        RuleInstance("forall", "w1", bx.body, fresh=y),
        RuleInstance("dp", "w1", term=y, target="w0"),
        RuleInstance("exists", "w0", ex, term=y),
        RuleInstance("dia", "w0", substitute(ex.body, y, Var(ex.var)), target="w1"),
        RuleInstance("ax", "w1", Atom("P", (y,))),
    ]
    return linear_proof(singleton(phi), steps, cfg)


def cbf_proof(cfg: CalculusConfig) -> Proof:
    """The converse Barcan formula derived with dp moving the eigenvariable up into the nesting."""
    phi = parse_formula(CBF_TEXT)
    dia, fa = phi.left, phi.right
    y = Var("y")
    bx = substitute(fa.body, y, Var(fa.var))
    steps = [
        RuleInstance("or", "w0", phi),
        RuleInstance("forall", "w0", fa, fresh=y),
        RuleInstance("box", "w0", bx, child="w1"),
        RuleInstance("dp", "w0", term=y, target="w1"),
        RuleInstance("dia", "w0", dia, target="w1"),
        RuleInstance("exists", "w1", dia.body, term=y),
        RuleInstance("ax", "w1", Atom("P", (y,))),
    ]
    return linear_proof(singleton(phi), steps, cfg)
