"""Inference rules, rule instances, proofs and the proof-checking kernel.

Rules are read bottom-up: ``premises_of`` maps a conclusion and a rule
instance to the list of premises, raising :class:`RuleError` when a side
condition fails.  ``check_proof`` re-derives every node and compares the
premises up to multiset equality and alpha-equivalence.

Rule identifiers (stable, used in JSON):

========  ===============================================================
``ax``    complementary literals ``L``, ``~L`` in one component
``or``    ``G{A \\/ B}`` from ``G{A, B}``
``and``   ``G{A /\\ B}`` from ``G{A}`` and ``G{B}``
``exists````G{t; exists x A}`` adds ``A(t/x)``; ``t`` in the signature
``forall````G{forall x A}`` from ``G{y; A(y/x)}`` with ``y`` fresh
``dia``   ``G{dia A}_w{}_u`` adds ``A`` at ``u`` when ``w ->L u``
``box``   ``G{box A}`` from ``G{[A]}``
``ref``   adds ``t != t``
``rep``   ``G{t != s, N(t/z)}`` adds ``N(s/z)`` for a negative literal ``N``
``drep``  ``G{t; t != s}`` adds ``s`` to the signature
``id``    copies ``s != t`` to another component
``dp``    copies a signature term along a path of the domain language
``d``     adds an empty child
``nd``    adds a fresh variable to a signature
``cd``    adds an arbitrary term to a signature
========  ===============================================================
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .grammar import BWD, FWD, SigmaSystem, build_sigma_system, s4, s5
from .reachability import Language, reach_relation, reachable
from .semantics import FrameConditions
from .sequent import NestedSequent, fresh_name, sequent_from_json, sequent_to_json
from .syntax import (
    And, Box, Dia, Exists, Forall, Formula, FreshSupply, Neq, Or, Term,
    format_formula, format_term, is_literal, is_negative_literal, literal_args,
    negate, parse_formula, parse_term, substitute, term_order_key, with_literal_args,
)

__all__ = [
    "RULES", "CUMULATIVE", "CalculusConfig", "RuleInstance", "Proof", "RuleError",
    "CheckReport", "premises_of", "applicable_instances", "check_proof",
    "proof_to_json", "proof_from_json", "instance_to_json", "instance_from_json",
]

RULES = ("ax", "or", "and", "exists", "forall", "dia", "box", "ref", "rep", "drep",
         "id", "dp", "d", "nd", "cd")

# rules whose premise contains the conclusion
CUMULATIVE = frozenset({"exists", "dia", "ref", "rep", "drep", "id", "dp", "d", "nd", "cd"})


class RuleError(ValueError):
    """A rule instance does not apply; ``condition`` names the failed check."""

    def __init__(self, rule: str, condition: str, detail: str = "") -> None:
        self.rule = rule
        self.condition = condition
        super().__init__(f"{rule}: {condition}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class CalculusConfig:
    """Frame conditions plus the languages governing dia and dp.

    ``dp_mode="star"`` (default) propagates terms along paths labelled by
    concatenations of strings in ``L_S(G)(fwd)`` (resp. ``bwd``, or both).
    ``dp_mode="literal"`` uses ``L_{S4 u S(G)}`` (resp. ``S5 u S(G)`` when
    both domain conditions hold); the two coincide unless S(G) contains a
    rule mentioning the converse of its left side and only one of the
    domain conditions is present.
    """

    conditions: FrameConditions = field(default_factory=FrameConditions)
    dp_mode: str = "star"

    def __post_init__(self) -> None:
        if self.dp_mode not in ("star", "literal"):
            raise ValueError(f"unknown dp_mode {self.dp_mode!r}")

    @classmethod
    def parse(cls, text: str, dp_mode: str = "star") -> "CalculusConfig":
        return cls(FrameConditions.parse(text), dp_mode)

    @cached_property
    def sigma(self) -> SigmaSystem:
        return build_sigma_system(self.conditions.paths)

    @cached_property
    def dia_language(self) -> Language:
        return Language(self.sigma, (FWD,))

    @cached_property
    def dp_language(self) -> Language | None:
        c = self.conditions
        if not (c.increasing or c.decreasing):
            return None
        if self.dp_mode == "literal":
            if c.increasing and c.decreasing:
                return Language(s5() | self.sigma, (FWD,))
            return Language(s4() | self.sigma, (FWD,) if c.increasing else (BWD,))
        starts = tuple(s for s, on in ((FWD, c.increasing), (BWD, c.decreasing)) if on)
        return Language(self.sigma, starts, star=True)

    def enabled(self, rule: str) -> bool:
        c = self.conditions
        return {
            "dp": c.increasing or c.decreasing,
            "d": c.serial,
            "nd": c.nonempty,
            "cd": c.classical,
        }.get(rule, rule in RULES)


@dataclass(frozen=True)
class RuleInstance:
    """A rule together with the data that pins down its premises.

    ``at`` is the principal component; ``formula`` the principal formula
    (for ``rep`` the rewritten negative literal); ``aux`` the inequality used
    by ``rep``; ``target`` the receiving component of ``dia``/``id``/``dp``;
    ``term`` the witness/added term; ``fresh`` the eigenvariable of
    ``forall``/``nd``; ``child`` the new component name of ``box``/``d``;
    ``positions`` the argument positions rewritten by ``rep``.
    """

    rule: str
    at: str
    formula: Formula | None = None
    aux: Formula | None = None
    target: str | None = None
    term: Term | None = None
    fresh: Term | None = None
    child: str | None = None
    positions: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        object.__setattr__(self, "positions", tuple(self.positions))

    def __str__(self) -> str:
        bits = [self.rule, f"@{self.at}"]
        if self.formula is not None:
            bits.append(format_formula(self.formula))
        if self.aux is not None:
            bits.append(f"using {format_formula(self.aux)}")
        if self.term is not None:
            bits.append(f"term {format_term(self.term)}")
        if self.fresh is not None:
            bits.append(f"fresh {format_term(self.fresh)}")
        if self.target is not None:
            bits.append(f"-> {self.target}")
        if self.child is not None:
            bits.append(f"child {self.child}")
        if self.positions:
            bits.append(f"positions {list(self.positions)}")
        return " ".join(bits)


def _need(cond: bool, rule: str, condition: str, detail: str = "") -> None:
    if not cond:
        raise RuleError(rule, condition, detail)


def _has(g: NestedSequent, at: str, phi: Formula | None) -> bool:
    return phi is not None and phi in g.component(at).formulas


def premises_of(g: NestedSequent, inst: RuleInstance, cfg: CalculusConfig) -> list[NestedSequent]:
    """Premises of ``inst`` applied to conclusion ``g``; raises RuleError."""
    r = inst.rule
    _need(cfg.enabled(r), r, "rule not available under the frame conditions")
    _need(inst.at in g, r, "principal component exists", inst.at)
    at = inst.at
    phi = inst.formula
    comp = g.component(at)

    if r == "ax":
        _need(phi is not None and is_literal(phi), r, "principal is a literal")
        _need(_has(g, at, phi) and _has(g, at, negate(phi)), r, "complementary literals present")
        return []
    if r == "or":
        _need(isinstance(phi, Or) and _has(g, at, phi), r, "principal disjunction present")
        return [g.remove_formula(at, phi).add_formula(at, phi.left, phi.right)]
    if r == "and":
        _need(isinstance(phi, And) and _has(g, at, phi), r, "principal conjunction present")
        base = g.remove_formula(at, phi)
        return [base.add_formula(at, phi.left), base.add_formula(at, phi.right)]
    if r == "exists":
        _need(isinstance(phi, Exists) and _has(g, at, phi), r, "principal existential present")
        _need(inst.term is not None and inst.term in comp.terms, r, "witness in signature")
        return [g.add_formula(at, substitute(phi.body, inst.term, phi.var))]
    if r == "forall":
        _need(isinstance(phi, Forall) and _has(g, at, phi), r, "principal universal present")
        y = inst.fresh
        _need(y is not None and y.is_var, r, "eigenvariable is a variable")
        _need(y not in g.free_vars(), r, "eigenvariable fresh", format_term(y))
        body = substitute(phi.body, y, phi.var)
        return [g.remove_formula(at, phi).add_term(at, y).add_formula(at, body)]
    if r == "dia":
        _need(isinstance(phi, Dia) and _has(g, at, phi), r, "principal diamond present")
        _need(inst.target is not None and inst.target in g, r, "target component exists")
        _need(reachable(g.prop_graph(), cfg.dia_language, FWD, at, inst.target), r,
              "target reachable", f"{at} -> {inst.target}")
        return [g.add_formula(inst.target, phi.body)]
    if r == "box":
        _need(isinstance(phi, Box) and _has(g, at, phi), r, "principal box present")
        _need(inst.child is not None and inst.child not in g, r, "child name fresh")
        child = NestedSequent(inst.child, (), (phi.body,))
        return [g.remove_formula(at, phi).add_child(at, child)]
    if r == "ref":
        _need(inst.term is not None, r, "term given")
        return [g.add_formula(at, Neq(inst.term, inst.term))]
    if r == "rep":
        eq = inst.aux
        _need(isinstance(eq, Neq) and _has(g, at, eq), r, "inequality present")
        _need(phi is not None and is_negative_literal(phi) and _has(g, at, phi), r,
              "negative literal present")
        args = list(literal_args(phi))
        _need(bool(inst.positions), r, "positions given")
        for p in inst.positions:
            _need(0 <= p < len(args) and args[p] == eq.left, r, "positions hold the rewritten term", str(p))
        for p in set(inst.positions):
            args[p] = eq.right
        return [g.add_formula(at, with_literal_args(phi, args))]
    if r == "drep":
        _need(isinstance(phi, Neq) and _has(g, at, phi), r, "inequality present")
        _need(phi.left in comp.terms, r, "left term in signature")
        return [g.add_term(at, phi.right)]
    if r == "id":
        _need(isinstance(phi, Neq) and _has(g, at, phi), r, "inequality present")
        _need(inst.target is not None and inst.target in g and inst.target != at, r, "distinct target exists")
        return [g.add_formula(inst.target, phi)]
    if r == "dp":
        t = inst.term
        _need(t is not None and t in comp.terms, r, "term in signature")
        _need(inst.target is not None and inst.target in g and inst.target != at, r, "distinct target exists")
        _need((at, inst.target) in reach_relation(g.prop_graph(), cfg.dp_language), r,
              "target reachable", f"{at} -> {inst.target}")
        return [g.add_term(inst.target, t)]
    if r == "d":
        _need(inst.child is not None and inst.child not in g, r, "child name fresh")
        return [g.add_child(at, NestedSequent(inst.child))]
    if r == "nd":
        y = inst.fresh
        _need(y is not None and y.is_var, r, "fresh term is a variable")
        _need(y not in g.free_vars(), r, "variable fresh", format_term(y))
        return [g.add_term(at, y)]
    if r == "cd":
        _need(inst.term is not None, r, "term given")
        return [g.add_term(at, inst.term)]
    raise RuleError(r, "known rule")


# ------------------------------------------------------------ enumeration

def applicable_instances(g: NestedSequent, cfg: CalculusConfig,
                         supply: FreshSupply | None = None,
                         reservoir: Iterable[Term] = ()) -> list[RuleInstance]:
    """Every rule instance applicable to ``g``.

    Terms for ``ref`` and ``cd`` come from the terms occurring in ``g``
    plus ``reservoir``; eigenvariables come from ``supply`` and component
    names from the first unused ``w<k>``.
    """
    supply = supply or FreshSupply()
    avoid = {t.name for t in g.free_vars()}
    fresh = supply.var(avoid)
    child = fresh_name(g)
    names = g.names()
    graph = g.prop_graph()
    dia_rel = reach_relation(graph, cfg.dia_language)
    dp_rel = reach_relation(graph, cfg.dp_language) if cfg.dp_language else frozenset()
    pool = sorted(set(g.terms_occurring()) | set(reservoir), key=term_order_key)
    out: list[RuleInstance] = []
    for c in g.components():
        w = c.name
        seen: set[Formula] = set()
        for phi in c.formulas:
            if phi in seen:
                continue
            seen.add(phi)
            if is_literal(phi) and negate(phi) in c.formulas:
                out.append(RuleInstance("ax", w, phi))
            if isinstance(phi, Or):
                out.append(RuleInstance("or", w, phi))
            elif isinstance(phi, And):
                out.append(RuleInstance("and", w, phi))
            elif isinstance(phi, Exists):
                out += [RuleInstance("exists", w, phi, term=t) for t in dict.fromkeys(c.terms)]
            elif isinstance(phi, Forall):
                out.append(RuleInstance("forall", w, phi, fresh=fresh))
            elif isinstance(phi, Dia):
                out += [RuleInstance("dia", w, phi, target=u) for u in names if (w, u) in dia_rel]
            elif isinstance(phi, Box):
                out.append(RuleInstance("box", w, phi, child=child))
            if isinstance(phi, Neq):
                if phi.left in c.terms:
                    out.append(RuleInstance("drep", w, phi))
                out += [RuleInstance("id", w, phi, target=u) for u in names if u != w]
                for lit in dict.fromkeys(c.formulas):
                    if is_negative_literal(lit):
                        args = literal_args(lit)
                        for p, a in enumerate(args):
                            if a == phi.left:
                                out.append(RuleInstance("rep", w, lit, aux=phi, positions=(p,)))
        out += [RuleInstance("ref", w, term=t) for t in pool]
        if cfg.enabled("dp"):
            for t in dict.fromkeys(c.terms):
                out += [RuleInstance("dp", w, term=t, target=u) for u in names if u != w and (w, u) in dp_rel]
        if cfg.enabled("d"):
            out.append(RuleInstance("d", w, child=child))
        if cfg.enabled("nd"):
            out.append(RuleInstance("nd", w, fresh=fresh))
        if cfg.enabled("cd"):
            out += [RuleInstance("cd", w, term=t) for t in pool]
    return out


# ----------------------------------------------------------------- proofs

@dataclass(frozen=True, eq=False)
class Proof:
    conclusion: NestedSequent
    instance: RuleInstance
    premises: tuple["Proof", ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(self.premises))

    @cached_property
    def height(self) -> int:
        """Number of nodes on the longest branch."""
        return 1 + max((p.height for p in self.premises), default=0)

    @cached_property
    def size(self) -> int:
        return 1 + sum(p.size for p in self.premises)

    def nodes(self) -> Iterator["Proof"]:
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.premises))

    def rules_used(self) -> set[str]:
        return {p.instance.rule for p in self.nodes()}

    def names_used(self) -> set[str]:
        out: set[str] = set()
        for p in self.nodes():
            out.update(p.conclusion.names())
        return out

    def vars_used(self) -> set[str]:
        out: set[str] = set()
        for p in self.nodes():
            out.update(t.name for t in p.conclusion.free_vars())
            if p.instance.fresh is not None:
                out.add(p.instance.fresh.name)
        return out

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.conclusion}    [{self.instance}]"]
        for q in self.premises:
            lines.append(q.pretty(indent + 1))
        return "\n".join(lines)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "proof is valid"
        return f"invalid at premise path {list(self.path)}: {self.message}"


def check_proof(p: Proof, cfg: CalculusConfig) -> CheckReport:
    """Re-derive every node; report the first failure in depth-first order."""
    stack: list[tuple[Proof, tuple[int, ...]]] = [(p, ())]
    while stack:
        node, path = stack.pop()
        try:
            expected = premises_of(node.conclusion, node.instance, cfg)
        except RuleError as exc:
            return CheckReport(False, path, str(exc))
        except KeyError as exc:
            return CheckReport(False, path, f"{node.instance.rule}: {exc}")
        if len(expected) != len(node.premises):
            return CheckReport(False, path, f"{node.instance.rule}: expected {len(expected)} premises, "
                                            f"found {len(node.premises)}")
        for i, (want, sub) in enumerate(zip(expected, node.premises)):
            if want != sub.conclusion:
                return CheckReport(False, path + (i,),
                                   f"premise mismatch after {node.instance.rule}: expected "
                                   f"{want!r}, found {sub.conclusion!r}")
        for i in reversed(range(len(node.premises))):
            stack.append((node.premises[i], path + (i,)))
    return CheckReport(True)


# ------------------------------------------------------------------- JSON

def instance_to_json(inst: RuleInstance) -> dict:
    out: dict = {"rule": inst.rule, "at": inst.at}
    if inst.formula is not None:
        out["formula"] = format_formula(inst.formula)
    if inst.aux is not None:
        out["aux"] = format_formula(inst.aux)
    if inst.target is not None:
        out["target"] = inst.target
    if inst.term is not None:
        out["term"] = format_term(inst.term)
    if inst.fresh is not None:
        out["fresh"] = format_term(inst.fresh)
    if inst.child is not None:
        out["child"] = inst.child
    if inst.positions:
        out["positions"] = list(inst.positions)
    return out


def instance_from_json(d: dict) -> RuleInstance:
    return RuleInstance(
        rule=d["rule"], at=d["at"],
        formula=parse_formula(d["formula"]) if "formula" in d else None,
        aux=parse_formula(d["aux"]) if "aux" in d else None,
        target=d.get("target"),
        term=parse_term(d["term"]) if "term" in d else None,
        fresh=parse_term(d["fresh"]) if "fresh" in d else None,
        child=d.get("child"),
        positions=tuple(d.get("positions", ())),
    )


def proof_to_json(p: Proof) -> dict:
    return {
        "conclusion": sequent_to_json(p.conclusion),
        "instance": instance_to_json(p.instance),
        "premises": [proof_to_json(q) for q in p.premises],
    }


def proof_from_json(d: dict | str) -> Proof:
    if isinstance(d, str):
        d = json.loads(d)
    return Proof(sequent_from_json(d["conclusion"]), instance_from_json(d["instance"]),
                 tuple(proof_from_json(q) for q in d.get("premises", ())))
