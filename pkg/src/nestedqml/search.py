"""Fair, bounded proof search with counter-model extraction.

Each round runs the phases

    dia, forall, ref, rep, id, dp, nd, cd, or, and, box, exists, drep, d

applying every enabled, non-redundant instance of the phase.  Cumulative
rules are skipped when their effect is already present.  A branch closes
as soon as it contains complementary literals.  A branch on which a whole
round changes nothing is saturated; its counter-model is built and
verified before ``Refuted`` is returned.

Bounded parts (documented deviations from an unbounded procedure):
``ref`` and ``cd`` draw terms only from those occurring on the branch (a
reservoir constant is used when none occur), ``nd`` fires only on empty
signatures and ``d`` only on components without a successor.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Union

from scipy.cluster.hierarchy import DisjointSet

from .calculus import CalculusConfig, Proof, RuleInstance, premises_of
from .reachability import reach_relation
from .semantics import Assignment, Model, check_frame, satisfies_sequent
from .sequent import NestedSequent, fresh_name
from .syntax import (
    And, Box, Const, Dia, Exists, Forall, FreshSupply, NegAtom, Neq, Or,
    Term, format_term, is_literal, is_negative_literal, literal_args, negate,
    substitute, term_order_key, with_literal_args,
)

__all__ = [
    "SearchBudget", "Proved", "Refuted", "Unknown", "SearchResult", "prove",
    "extract_countermodel", "TermPartition", "ExtractionError", "PHASES", "reservoir",
]

PHASES = ("dia", "forall", "ref", "rep", "id", "dp", "nd", "cd",
          "or", "and", "box", "exists", "drep", "d")


@dataclass(frozen=True)
class SearchBudget:
    max_rounds: int = 40
    max_sequent_size: int = 300
    max_fresh_terms: int = 1
    max_seconds: float | None = None


@dataclass(frozen=True)
class Proved:
    proof: Proof


@dataclass(frozen=True)
class Refuted:
    model: Model
    assignment: Assignment
    interpretation: dict[str, str]
    branch: NestedSequent


@dataclass(frozen=True)
class Unknown:
    reason: str
    branch: NestedSequent | None = None


SearchResult = Union[Proved, Refuted, Unknown]


class ExtractionError(RuntimeError):
    """The model read off a saturated branch failed verification."""


def reservoir(n: int) -> list[Term]:
    return [Const(f"_k{i}") for i in range(n)]


# ------------------------------------------------------------- partition

class TermPartition:
    """Classes of terms under the closure of the inequalities on a branch."""

    def __init__(self, terms: set[Term], pairs: list[tuple[Term, Term]]) -> None:
        self._ds = DisjointSet(sorted(terms, key=term_order_key))
        for t, s in pairs:
            self._ds.merge(t, s)
        self._pairs = set(pairs)

    def rep(self, t: Term) -> Term:
        return min(self._ds.subset(t), key=term_order_key)

    def element(self, t: Term) -> str:
        return "[" + format_term(self.rep(t)) + "]"

    def classes(self) -> list[list[Term]]:
        return sorted((sorted(c, key=term_order_key) for c in self._ds.subsets()),
                      key=lambda c: term_order_key(c[0]))

    def closed(self) -> bool:
        """Every pair of terms in a common class occurs as an inequality."""
        return all((t, s) in self._pairs for c in self.classes() for t in c for s in c)


def extract_countermodel(branch: NestedSequent, cfg: CalculusConfig, spare: Term | None = None,
                         ) -> tuple[Model, Assignment, dict[str, str]]:
    """Read a counter-model off an open, saturated branch."""
    for c in branch.components():
        if any(is_literal(f) and negate(f) in c.formulas for f in c.formulas):
            raise ExtractionError(f"branch is ax-closed at {c.name}")
    graph = branch.prop_graph()
    rel = reach_relation(graph, cfg.dia_language)
    terms = set(branch.terms_occurring())
    if not terms:
        terms = {spare or reservoir(1)[0]}
    pairs = [(f.left, f.right) for c in branch.components() for f in c.formulas if isinstance(f, Neq)]
    part = TermPartition(terms, pairs)
    el = part.element
    universe = tuple(el(c[0]) for c in part.classes())
    domains = {c.name: frozenset(el(t) for t in c.terms) for c in branch.components()}
    preds: dict[str, dict[str, set]] = {}
    for c in branch.components():
        ext: dict[str, set] = {}
        for f in c.formulas:
            if isinstance(f, NegAtom):
                ext.setdefault(f.pred, set()).add(tuple(el(t) for t in f.args))
        preds[c.name] = ext
    consts = {t.name: el(t) for t in terms if not t.is_var}
    model = Model(tuple(branch.names()), frozenset(rel), universe, domains, preds, consts)
    sigma = Assignment({t.name: el(t) for t in terms if t.is_var}, universe[0])
    iota = {n: n for n in branch.names()}
    return model, sigma, iota


# ---------------------------------------------------------------- search

@dataclass
class _Ctx:
    cfg: CalculusConfig
    budget: SearchBudget
    supply: FreshSupply
    deadline: float | None
    goal_names: frozenset[str]


def _find_ax(g: NestedSequent) -> RuleInstance | None:
    for c in g.components():
        fs = set(c.formulas)
        for f in c.formulas:
            if is_literal(f) and negate(f) in fs:
                return RuleInstance("ax", c.name, f)
    return None


def _pool(g: NestedSequent, ctx: _Ctx) -> list[Term]:
    terms = g.terms_occurring()
    if not terms:
        return reservoir(ctx.budget.max_fresh_terms)
    return sorted(terms, key=term_order_key)


def _collect(phase: str, g: NestedSequent, ctx: _Ctx) -> list[RuleInstance]:
    cfg = ctx.cfg
    if not cfg.enabled(phase):
        return []
    out: list[RuleInstance] = []
    comps = list(g.components())
    if phase == "dia":
        rel = reach_relation(g.prop_graph(), cfg.dia_language)
        for c in comps:
            for f in dict.fromkeys(x for x in c.formulas if isinstance(x, Dia)):
                out += [RuleInstance("dia", c.name, f, target=u) for u in g.names() if (c.name, u) in rel]
    elif phase in ("forall", "or", "and", "box"):
        cls = {"forall": Forall, "or": Or, "and": And, "box": Box}[phase]
        for c in comps:
            out += [RuleInstance(phase, c.name, f) for f in c.formulas if isinstance(f, cls)]
    elif phase in ("ref", "cd"):
        pool = _pool(g, ctx)
        for c in comps:
            for t in pool:
                if phase == "ref" and Neq(t, t) not in c.formulas or phase == "cd" and t not in c.terms:
                    out.append(RuleInstance(phase, c.name, term=t))
                    break
    elif phase == "rep":
        for c in comps:
            negs = list(dict.fromkeys(f for f in c.formulas if is_negative_literal(f)))
            for eq in dict.fromkeys(f for f in c.formulas if isinstance(f, Neq)):
                if eq.left == eq.right:
                    continue
                for lit in negs:
                    for p, a in enumerate(literal_args(lit)):
                        if a == eq.left:
                            out.append(RuleInstance("rep", c.name, lit, aux=eq, positions=(p,)))
    elif phase == "id":
        for c in comps:
            for f in dict.fromkeys(x for x in c.formulas if isinstance(x, Neq)):
                out += [RuleInstance("id", c.name, f, target=u) for u in g.names() if u != c.name]
    elif phase == "dp":
        rel = reach_relation(g.prop_graph(), cfg.dp_language)
        for c in comps:
            for t in dict.fromkeys(c.terms):
                out += [RuleInstance("dp", c.name, term=t, target=u)
                        for u in g.names() if u != c.name and (c.name, u) in rel]
    elif phase == "nd":
        out += [RuleInstance("nd", c.name) for c in comps if not c.terms]
    elif phase == "exists":
        for c in comps:
            for f in dict.fromkeys(x for x in c.formulas if isinstance(x, Exists)):
                out += [RuleInstance("exists", c.name, f, term=t) for t in dict.fromkeys(c.terms)]
    elif phase == "drep":
        for c in comps:
            for f in dict.fromkeys(x for x in c.formulas if isinstance(x, Neq)):
                if f.left in c.terms:
                    out.append(RuleInstance("drep", c.name, f))
    elif phase == "d":
        out += [RuleInstance("d", c.name) for c in comps]
    return out


def _redundant(inst: RuleInstance, g: NestedSequent, ctx: _Ctx) -> bool:
    """True if the instance no longer applies or its effect is already present."""
    r = inst.rule
    c = g.component(inst.at)
    f = inst.formula
    if r in ("forall", "or", "and", "box"):
        return f not in c.formulas
    if r == "dia":
        return f.body in g.component(inst.target).formulas
    if r == "ref":
        return Neq(inst.term, inst.term) in c.formulas
    if r == "rep":
        args = list(literal_args(f))
        for p in inst.positions:
            args[p] = inst.aux.right
        return with_literal_args(f, args) in c.formulas
    if r == "id":
        return f in g.component(inst.target).formulas
    if r == "dp":
        return inst.term in g.component(inst.target).terms
    if r == "nd":
        return bool(c.terms)
    if r == "cd":
        return inst.term in c.terms
    if r == "exists":
        return substitute(f.body, inst.term, f.var) in c.formulas
    if r == "drep":
        return f.right in c.terms
    if r == "d":
        rel = reach_relation(g.prop_graph(), ctx.cfg.dia_language)
        return any((inst.at, u) in rel for u in g.names())
    return False


def _complete(inst: RuleInstance, g: NestedSequent, ctx: _Ctx) -> RuleInstance:
    """Fill in eigenvariables and new component names at application time."""
    if inst.rule in ("forall", "nd"):
        avoid = {t.name for t in g.free_vars()}
        return RuleInstance(inst.rule, inst.at, inst.formula, fresh=ctx.supply.var(avoid))
    if inst.rule in ("box", "d"):
        return RuleInstance(inst.rule, inst.at, inst.formula, child=fresh_name(set(g.names()) | ctx.goal_names))
    return inst


@dataclass
class _Outcome:
    kind: str  # "closed", "open", "unknown"
    proof: Proof | None = None
    branch: NestedSequent | None = None
    reason: str = ""


def _wrap(steps: list[tuple[NestedSequent, RuleInstance]], top: Proof) -> Proof:
    for seq, inst in reversed(steps):
        top = Proof(seq, inst, (top,))
    return top


def _run(seq: NestedSequent, round_no: int, phase_idx: int, pending: list[RuleInstance] | None,
         changed: bool, ctx: _Ctx) -> _Outcome:
    steps: list[tuple[NestedSequent, RuleInstance]] = []
    budget = ctx.budget
    while True:
        ax = _find_ax(seq)
        if ax is not None:
            return _Outcome("closed", _wrap(steps, Proof(seq, ax)))
        if seq.size() > budget.max_sequent_size:
            return _Outcome("unknown", branch=seq, reason="sequent size limit")
        if ctx.deadline is not None and time.monotonic() > ctx.deadline:
            return _Outcome("unknown", branch=seq, reason="time limit")
        if pending is None:
            if phase_idx == len(PHASES):
                if not changed:
                    return _Outcome("open", branch=seq)
                round_no += 1
                phase_idx = 0
                changed = False
                if round_no >= budget.max_rounds:
                    return _Outcome("unknown", branch=seq, reason="round limit")
            pending = _collect(PHASES[phase_idx], seq, ctx)
        if not pending:
            pending = None
            phase_idx += 1
            continue
        inst = pending.pop(0)
        if _redundant(inst, seq, ctx):
            continue
        inst = _complete(inst, seq, ctx)
        prems = premises_of(seq, inst, ctx.cfg)
        changed = True
        if len(prems) == 1:
            steps.append((seq, inst))
            seq = prems[0]
            continue
        subs: list[Proof] = []
        unknown: _Outcome | None = None
        for p in prems:
            out = _run(p, round_no, phase_idx, list(pending), True, ctx)
            if out.kind == "open":
                return out
            if out.kind == "unknown":
                unknown = unknown or out
                continue
            subs.append(out.proof)
        if unknown is not None:
            return unknown
        return _Outcome("closed", _wrap(steps, Proof(seq, inst, tuple(subs))))


def prove(goal: NestedSequent, cfg: CalculusConfig | None = None,
          budget: SearchBudget | None = None) -> SearchResult:
    """Search for a proof of ``goal``; on saturation return a verified counter-model."""
    cfg = cfg or CalculusConfig()
    budget = budget or SearchBudget()
    deadline = time.monotonic() + budget.max_seconds if budget.max_seconds else None
    ctx = _Ctx(cfg, budget, FreshSupply(), deadline, frozenset(goal.names()))
    out = _run(goal, 0, 0, None, False, ctx)
    if out.kind == "closed":
        return Proved(out.proof)
    if out.kind == "unknown":
        return Unknown(out.reason, out.branch)
    model, sigma, iota = extract_countermodel(out.branch, cfg, reservoir(max(1, budget.max_fresh_terms))[0])
    report = check_frame(model, cfg.conditions)
    if not report:
        raise ExtractionError("extracted model violates " + ", ".join(report.failures()))
    if satisfies_sequent(model, sigma, iota, goal):
        raise ExtractionError("extracted model does not falsify the goal")
    return Refuted(model, sigma, iota, out.branch)
