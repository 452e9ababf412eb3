"""Proof transformations: admissible structural rules, inversion, shift,
cut elimination and the derived equality and Barcan-style rules.

All transformations build new :class:`~nestedqml.calculus.Proof` objects
node by node; none of them consult the search procedure.  Those marked
height-preserving return a proof whose height does not exceed the input's.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from .calculus import CalculusConfig, Proof, RuleInstance, premises_of
from .reachability import reach_relation
from .sequent import NestedSequent, fresh_name
from .syntax import (
    And, Box, Dia, Eq, Exists, Forall, Formula, Neq, Or, Term,
    fresh_var, free_vars, is_literal, is_negative_literal, length, literal_args,
    negate, substitute, with_literal_args,
)

__all__ = [
    "TransformError", "CutMeasureError", "CutStats", "weaken", "term_weaken",
    "ext_weaken", "nec", "subst_proof", "rename_components", "invert",
    "contract", "term_contract", "ext_contract", "shift", "derive_ebr",
    "generalized_axiom", "eliminate_cut", "eq_refl", "eq_sym", "eq_tra",
    "eq_replacement", "eq_grp", "merge_components",
]


class TransformError(ValueError):
    """Preconditions of a transformation are not met."""


class CutMeasureError(AssertionError):
    """A recursive cut did not decrease (formula length, height sum)."""


# ------------------------------------------------------------ utilities

def _vars_of(t: Term | Iterable[Formula]) -> set[str]:
    if isinstance(t, Term):
        return {t.name} if t.is_var else set()
    out: set[str] = set()
    for f in t:
        out |= {v.name for v in free_vars(f)}
    return out


def _rename_eigen(p: Proof, avoid: set[str]) -> Proof:
    """If the root introduces an eigenvariable in ``avoid``, rename it throughout the subproof."""
    inst = p.instance
    if inst.rule not in ("forall", "nd") or inst.fresh.name not in avoid:
        return p
    z = fresh_var(avoid | p.vars_used())
    prem = subst_proof(p.premises[0], z, inst.fresh)
    return Proof(p.conclusion, replace(inst, fresh=z), (prem,))


def _map_inst_names(inst: RuleInstance, m: Callable[[str], str]) -> RuleInstance:
    return replace(inst, at=m(inst.at),
                   target=m(inst.target) if inst.target is not None else None,
                   child=m(inst.child) if inst.child is not None else None)


def rename_components(p: Proof, mapping: dict[str, str]) -> Proof:
    """Rename components everywhere in the proof (mapping must stay injective)."""
    m = lambda n: mapping.get(n, n)  # noqa: E731
    return Proof(p.conclusion.rename(mapping), _map_inst_names(p.instance, m),
                 tuple(rename_components(q, mapping) for q in p.premises))


def _free_name(p: Proof, name: str) -> Proof:
    """Make sure no component called ``name`` occurs anywhere in ``p``."""
    used = p.names_used()
    if name not in used:
        return p
    return rename_components(p, {name: fresh_name(used | {name})})


# ------------------------------------------------- weakening and friends

def _extend(p: Proof, fn: Callable[[NestedSequent], NestedSequent], new_vars: set[str]) -> Proof:
    p = _rename_eigen(p, new_vars)
    return Proof(fn(p.conclusion), p.instance, tuple(_extend(q, fn, new_vars) for q in p.premises))


def weaken(p: Proof, at: str, *phis: Formula) -> Proof:
    """Height-preserving weakening: add formulas to component ``at`` throughout."""
    if at not in p.conclusion:
        raise TransformError(f"no component {at!r}")
    return _extend(p, lambda g: g.add_formula(at, *phis), _vars_of(phis))


def term_weaken(p: Proof, at: str, *terms: Term) -> Proof:
    """Height-preserving term weakening."""
    if at not in p.conclusion:
        raise TransformError(f"no component {at!r}")
    new = set().union(*(_vars_of(t) for t in terms)) if terms else set()
    return _extend(p, lambda g: g.add_term(at, *terms), new)


def ext_weaken(p: Proof, at: str, name: str | None = None) -> Proof:
    """Height-preserving external weakening: add an empty child under ``at``."""
    if at not in p.conclusion:
        raise TransformError(f"no component {at!r}")
    if name is None:
        name = fresh_name(p.names_used())
    elif name in p.conclusion:
        raise TransformError(f"component {name!r} already exists")
    p = _free_name(p, name)
    return _extend(p, lambda g: g.add_child(at, NestedSequent(name)), set())


def nec(p: Proof, name: str | None = None) -> Proof:
    """Height-preserving necessitation: wrap every sequent in a new root."""
    if name is None:
        name = fresh_name(p.names_used())
    p = _free_name(p, name)
    return _extend(p, lambda g: NestedSequent(name, (), (), (g,)), set())


# ----------------------------------------------------------- substitution

def _subst_inst(inst: RuleInstance, t: Term, x: Term) -> RuleInstance:
    sub = lambda f: substitute(f, t, x) if f is not None else None  # noqa: E731
    st = lambda s: (t if s == x else s) if s is not None else None  # noqa: E731
    return replace(inst, formula=sub(inst.formula), aux=sub(inst.aux), term=st(inst.term))


def subst_proof(p: Proof, t: Term, x: Term) -> Proof:
    """Height-preserving substitution of ``t`` for variable ``x`` throughout."""
    if not x.is_var:
        raise TransformError("can only substitute for a variable")
    if t == x:
        return p
    p = _rename_eigen(p, {x.name} | _vars_of(t))
    return Proof(p.conclusion.substitute(t, x), _subst_inst(p.instance, t, x),
                 tuple(subst_proof(q, t, x) for q in p.premises))


# -------------------------------------------------------------- inversion

def _push(p: Proof, fn: Callable[[NestedSequent], NestedSequent],
          stop: Callable[[Proof], Proof | None], new_vars: set[str]) -> Proof:
    done = stop(p)
    if done is not None:
        return done
    p = _rename_eigen(p, new_vars)
    return Proof(fn(p.conclusion), p.instance, tuple(_push(q, fn, stop, new_vars) for q in p.premises))


def invert(p: Proof, inst: RuleInstance, index: int = 0) -> Proof:
    """Height-preserving inversion: from a proof of a conclusion of ``inst``
    obtain a proof of its ``index``-th premise."""
    g = p.conclusion
    r = inst.rule
    at = inst.at
    f = inst.formula
    if r == "exists":
        return weaken(p, at, substitute(f.body, inst.term, f.var))
    if r == "dia":
        return weaken(p, inst.target, f.body)
    if r == "ref":
        return weaken(p, at, Neq(inst.term, inst.term))
    if r == "rep":
        args = list(literal_args(f))
        for i in inst.positions:
            args[i] = inst.aux.right
        return weaken(p, at, with_literal_args(f, args))
    if r == "id":
        return weaken(p, inst.target, f)
    if r == "drep":
        return term_weaken(p, at, f.right)
    if r == "dp":
        return term_weaken(p, inst.target, inst.term)
    if r == "cd":
        return term_weaken(p, at, inst.term)
    if r == "nd":
        return term_weaken(p, at, inst.fresh)
    if r == "d":
        return ext_weaken(p, at, inst.child)
    if r == "ax":
        raise TransformError("ax has no premises")
    if f not in g.component(at).formulas:
        raise TransformError(f"{f} not in component {at}")

    def principal(q: Proof) -> bool:
        i = q.instance
        return i.rule == r and i.at == at and i.formula == f

    if r in ("or", "and"):
        parts = (f.left, f.right) if r == "or" else ((f.left, f.right)[index],)
        fn = lambda s: s.remove_formula(at, f).add_formula(at, *parts)  # noqa: E731
        stop = lambda q: q.premises[index if r == "and" else 0] if principal(q) else None  # noqa: E731
        return _push(p, fn, stop, set())
    if r == "forall":
        y = inst.fresh
        if y in g.free_vars():
            raise TransformError(f"{y} is not fresh")
        body = substitute(f.body, y, f.var)
        fn = lambda s: s.remove_formula(at, f).add_term(at, y).add_formula(at, body)  # noqa: E731

        def stop(q: Proof) -> Proof | None:
            if not principal(q):
                return None
            return subst_proof(q.premises[0], y, q.instance.fresh)
        return _push(p, fn, stop, {y.name})
    if r == "box":
        c = inst.child
        if c in g:
            raise TransformError(f"component {c!r} already exists")
        p = _free_name(p, c)
        fn = lambda s: s.remove_formula(at, f).add_child(at, NestedSequent(c, (), (f.body,)))  # noqa: E731

        def stop(q: Proof) -> Proof | None:
            if not principal(q):
                return None
            return rename_components(q.premises[0], {q.instance.child: c})
        return _push(p, fn, stop, set())
    raise TransformError(f"cannot invert {r}")


# ------------------------------------------------------------ contraction

def term_contract(p: Proof, at: str, t: Term) -> Proof:
    """Height-preserving term contraction: drop one copy of ``t`` from ``at``."""
    if p.conclusion.component(at).terms.count(t) < 2:
        raise TransformError(f"{t} does not occur twice in {at}")
    return _tc(p, at, t)


def _tc(p: Proof, at: str, t: Term) -> Proof:
    return Proof(p.conclusion.remove_term(at, t), p.instance, tuple(_tc(q, at, t) for q in p.premises))


def contract(p: Proof, at: str, phi: Formula) -> Proof:
    """Height-preserving contraction: drop one copy of ``phi`` from ``at``."""
    if p.conclusion.component(at).formulas.count(phi) < 2:
        raise TransformError(f"{phi} does not occur twice in {at}")
    inst = p.instance
    concl = p.conclusion.remove_formula(at, phi)
    if not (inst.at == at and inst.formula == phi and inst.rule in ("or", "and", "forall", "box")):
        return Proof(concl, inst, tuple(contract(q, at, phi) for q in p.premises))
    r = inst.rule
    if r == "or":
        q = invert(p.premises[0], inst)
        q = contract(contract(q, at, phi.left), at, phi.right)
        return Proof(concl, inst, (q,))
    if r == "and":
        prems = []
        for i, part in enumerate((phi.left, phi.right)):
            q = invert(p.premises[i], inst, i)
            prems.append(contract(q, at, part))
        return Proof(concl, inst, tuple(prems))
    if r == "forall":
        y = inst.fresh
        q = p.premises[0]
        z = fresh_var(q.vars_used() | {y.name})
        q = invert(q, replace(inst, fresh=z))
        q = subst_proof(q, y, z)
        q = term_contract(q, at, y)
        q = contract(q, at, substitute(phi.body, y, phi.var))
        return Proof(concl, inst, (q,))
    # box
    c = inst.child
    q = p.premises[0]
    d = fresh_name(q.names_used())
    q = invert(q, replace(inst, child=d))
    q = ext_contract(q, at, c, d)
    q = contract(q, c, phi.body)
    return Proof(concl, inst, (q,))


def merge_components(g: NestedSequent, src: str, dst: str) -> NestedSequent:
    """Remove the subtree at ``src`` and merge its root into ``dst``."""
    sub = g.component(src)
    if dst in sub:
        raise TransformError(f"{dst} lies inside the subtree of {src}")
    g2 = g.remove_child(src)
    return g2.update(dst, lambda c: NestedSequent(c.name, c.terms + sub.terms, c.formulas + sub.formulas,
                                                  c.children + sub.children))


def _merge(p: Proof, src: str, dst: str) -> Proof:
    inst = p.instance
    if inst.rule in ("id", "dp") and {inst.at, inst.target} == {src, dst}:
        q = _merge(p.premises[0], src, dst)
        if inst.rule == "id":
            return contract(q, dst, inst.formula)
        return term_contract(q, dst, inst.term)
    m = lambda n: dst if n == src else n  # noqa: E731
    return Proof(merge_components(p.conclusion, src, dst), _map_inst_names(inst, m),
                 tuple(_merge(q, src, dst) for q in p.premises))


def ext_contract(p: Proof, at: str, u: str, v: str) -> Proof:
    """Height-preserving external contraction: merge sibling ``v`` into ``u`` (both children of ``at``)."""
    g = p.conclusion
    kids = [c.name for c in g.component(at).children]
    if u not in kids or v not in kids or u == v:
        raise TransformError(f"{u} and {v} must be distinct children of {at}")
    return _merge(p, v, u)


def shift(p: Proof, w: str, v: str, child: str, cfg: CalculusConfig) -> Proof:
    """Height-preserving shift of the nesting ``child`` of ``w`` into component ``v``.

    Requires ``w ->L v`` with ``L = L_S(G)(fwd)`` in the sequent without the
    shifted subtree.
    """
    g = p.conclusion
    if child not in [c.name for c in g.component(w).children]:
        raise TransformError(f"{child} is not a child of {w}")
    if v in g.component(child):
        raise TransformError(f"{v} lies inside the shifted nesting")
    rest = g.remove_child(child)
    if (w, v) not in reach_relation(rest.prop_graph(), cfg.dia_language):
        raise TransformError(f"{v} is not reachable from {w}")
    return _merge(p, child, v)


# ------------------------------------------------------- generalized axiom

def generalized_axiom(g: NestedSequent, at: str, phi: Formula) -> Proof:
    """A cut-free proof of ``g`` extended by ``phi`` and its negation at ``at``."""
    nphi = negate(phi)
    concl = g.add_formula(at, phi, nphi)
    if is_literal(phi):
        return Proof(concl, RuleInstance("ax", at, phi))
    if isinstance(phi, (Or, And)):
        dis, con = (phi, nphi) if isinstance(phi, Or) else (nphi, phi)
        base = g.add_formula(at, dis.left, dis.right)
        # subproof i closes con.i against dis.i with the other disjunct as context
        p1 = generalized_axiom(g.add_formula(at, dis.right), at, dis.left)
        p2 = generalized_axiom(g.add_formula(at, dis.left), at, dis.right)
        mid = Proof(base.add_formula(at, con), RuleInstance("and", at, con), (p1, p2))
        return Proof(concl, RuleInstance("or", at, dis), (mid,))
    if isinstance(phi, (Forall, Exists)):
        uni, ex = (phi, nphi) if isinstance(phi, Forall) else (nphi, phi)
        names = {t.name for t in g.free_vars()} | {t.name for t in free_vars(phi)}
        y = fresh_var(names)
        inst_u = substitute(uni.body, y, uni.var)
        base = g.add_term(at, y)
        sub = generalized_axiom(base.add_formula(at, ex), at, inst_u)
        mid = Proof(base.add_formula(at, inst_u, ex), RuleInstance("exists", at, ex, term=y), (sub,))
        return Proof(concl, RuleInstance("forall", at, uni, fresh=y), (mid,))
    if isinstance(phi, (Box, Dia)):
        box, dia = (phi, nphi) if isinstance(phi, Box) else (nphi, phi)
        c = fresh_name(g)
        base = g.add_formula(at, dia)
        sub = generalized_axiom(base.add_child(at, NestedSequent(c)), c, box.body)
        mid = Proof(base.add_child(at, NestedSequent(c, (), (box.body,))),
                    RuleInstance("dia", at, dia, target=c), (sub,))
        return Proof(concl, RuleInstance("box", at, box, child=c), (mid,))
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------- Barcan-style

def _ebr_levels(phi: Formula, n: int) -> tuple[list[Formula], Formula]:
    antecedents = []
    cur = phi
    for _ in range(n + 1):
        if not (isinstance(cur, Or) and isinstance(cur.right, Box)):
            raise TransformError("formula does not have the shape A0 -> box(A1 -> ... box B)")
        antecedents.append(cur.left)
        cur = cur.right.body
    return antecedents, cur


def derive_ebr(p: Proof, n: int, x: Term) -> Proof:
    """From a proof of ``A0 -> box(A1 -> ... box(An -> box B))`` build one of the
    same formula with ``B`` replaced by ``forall x. B``; ``x`` must not occur free in the ``Ai``."""
    g = p.conclusion
    if g.terms or g.children or len(g.formulas) != 1:
        raise TransformError("expected a proof of a single formula")
    if not x.is_var:
        raise TransformError("x must be a variable")
    root = g.name
    phi = g.formulas[0]
    ants, inner = _ebr_levels(phi, n)
    if any(x in free_vars(a) for a in ants):
        raise TransformError(f"{x} occurs free in an antecedent")
    comps = [root]
    cur = p
    f = phi
    used = set(p.names_used())
    for i in range(n + 1):
        cur = invert(cur, RuleInstance("or", comps[-1], f))
        c = fresh_name(used)
        used.add(c)
        cur = invert(cur, RuleInstance("box", comps[-1], f.right, child=c))
        comps.append(c)
        f = f.right.body
    leaf = comps[-1]
    cur = term_weaken(cur, leaf, x)
    quant = Forall(x.name, inner)
    g_top = cur.conclusion.remove_term(leaf, x).remove_formula(leaf, inner).add_formula(leaf, quant)
    cur = Proof(g_top, RuleInstance("forall", leaf, quant, fresh=x), (cur,))
    body: Formula = quant
    for i in reversed(range(n + 1)):
        parent = comps[i]
        boxed = Box(body)
        g_box = cur.conclusion.remove_child(comps[i + 1]).add_formula(parent, boxed)
        cur = Proof(g_box, RuleInstance("box", parent, boxed, child=comps[i + 1]), (cur,))
        disj = Or(ants[i], boxed)
        g_or = cur.conclusion.remove_formula(parent, ants[i]).remove_formula(parent, boxed).add_formula(parent, disj)
        cur = Proof(g_or, RuleInstance("or", parent, disj), (cur,))
        body = disj
    return cur


# ------------------------------------------------------------ equality

def eq_refl(g: NestedSequent, at: str, t: Term) -> Proof:
    """Proof of ``g`` extended by ``t = t`` at ``at``."""
    concl = g.add_formula(at, Eq(t, t))
    return Proof(concl, RuleInstance("ref", at, term=t),
                 (Proof(concl.add_formula(at, Neq(t, t)), RuleInstance("ax", at, Eq(t, t))),))


def eq_sym(p: Proof, at: str, t: Term, s: Term) -> Proof:
    """From ``G{t != s, s != t}`` to ``G{t != s}``."""
    c = p.conclusion.component(at).formulas
    if Neq(t, s) not in c or Neq(s, t) not in c:
        raise TransformError("expected both t != s and s != t")
    g2 = p.conclusion.remove_formula(at, Neq(s, t))
    q = weaken(p, at, Neq(t, t))
    rep = Proof(g2.add_formula(at, Neq(t, t)),
                RuleInstance("rep", at, Neq(t, t), aux=Neq(t, s), positions=(0,)), (q,))
    return Proof(g2, RuleInstance("ref", at, term=t), (rep,))


def eq_tra(p: Proof, at: str, t: Term, s: Term, r: Term) -> Proof:
    """From ``G{t != s, s != r, t != r}`` to ``G{t != s, s != r}``."""
    c = p.conclusion.component(at).formulas
    if not all(f in c for f in (Neq(t, s), Neq(s, r), Neq(t, r))):
        raise TransformError("expected t != s, s != r and t != r")
    g2 = p.conclusion.remove_formula(at, Neq(t, r))
    q = weaken(p, at, Neq(s, t))
    rep = Proof(g2.add_formula(at, Neq(s, t)),
                RuleInstance("rep", at, Neq(s, r), aux=Neq(s, t), positions=(0,)), (q,))
    return eq_sym(rep, at, t, s)


def _zpos(lit: Formula, z: Term) -> tuple[int, ...]:
    return tuple(i for i, a in enumerate(literal_args(lit)) if a == z)


def eq_replacement(g: NestedSequent, at: str, t: Term, s: Term, phi: Formula, z: Term) -> Proof:
    """Proof of ``g{t != s, phi(t/z), ~phi(s/z)}`` at component ``at``."""
    if not z.is_var:
        raise TransformError("z must be a variable")
    return _repl(g.add_formula(at, Neq(t, s)), at, t, s, phi, z)


def _repl(g: NestedSequent, at: str, t: Term, s: Term, phi: Formula, z: Term) -> Proof:
    if z not in free_vars(phi):
        return generalized_axiom(g, at, phi)
    a = substitute(phi, t, z)
    b = substitute(negate(phi), s, z)
    concl = g.add_formula(at, a, b)
    if is_literal(phi):
        pos = _zpos(phi, z)
        if is_negative_literal(a):
            top = concl.add_formula(at, negate(b))
            return Proof(concl, RuleInstance("rep", at, a, aux=Neq(t, s), positions=pos),
                         (Proof(top, RuleInstance("ax", at, b)),))
        with_sym = concl.add_formula(at, Neq(s, t))
        top = with_sym.add_formula(at, negate(a))
        p1 = Proof(with_sym, RuleInstance("rep", at, b, aux=Neq(s, t), positions=pos),
                   (Proof(top, RuleInstance("ax", at, a)),))
        return eq_sym(p1, at, t, s)
    sub_t = lambda f: substitute(f, t, z)  # noqa: E731
    sub_s = lambda f: substitute(negate(f), s, z)  # noqa: E731
    if isinstance(phi, Or):
        l, r = phi.left, phi.right
        p1 = _repl(g.add_formula(at, sub_t(r)), at, t, s, l, z)
        p2 = _repl(g.add_formula(at, sub_t(l)), at, t, s, r, z)
        mid = Proof(g.add_formula(at, sub_t(l), sub_t(r), b), RuleInstance("and", at, b), (p1, p2))
        return Proof(concl, RuleInstance("or", at, a), (mid,))
    if isinstance(phi, And):
        l, r = phi.left, phi.right
        p1 = _repl(g.add_formula(at, sub_s(r)), at, t, s, l, z)
        p2 = _repl(g.add_formula(at, sub_s(l)), at, t, s, r, z)
        mid = Proof(g.add_formula(at, a, sub_s(l), sub_s(r)), RuleInstance("and", at, a), (p1, p2))
        return Proof(concl, RuleInstance("or", at, b), (mid,))
    if isinstance(phi, (Forall, Exists)):
        names = {v.name for v in g.free_vars()} | _vars_of([phi]) | _vars_of(t) | _vars_of(s) | {z.name}
        y = fresh_var(names)
        psi = substitute(phi.body, y, phi.var)
        uni, ex = (a, b) if isinstance(phi, Forall) else (b, a)
        base = g.add_term(at, y)
        sub = _repl(base.add_formula(at, ex), at, t, s, psi, z)
        inst_u = substitute(uni.body, y, uni.var)
        mid = Proof(base.add_formula(at, inst_u, ex), RuleInstance("exists", at, ex, term=y), (sub,))
        return Proof(concl, RuleInstance("forall", at, uni, fresh=y), (mid,))
    if isinstance(phi, (Box, Dia)):
        box, dia = (a, b) if isinstance(phi, Box) else (b, a)
        c = fresh_name(g)
        base = g.add_formula(at, dia)
        inner = NestedSequent(c, (), (Neq(t, s),))
        sub = _repl(base.add_child(at, inner), c, t, s, phi.body, z)
        boxed_body, dia_body = box.body, dia.body
        after_dia = base.add_child(at, NestedSequent(c, (), (boxed_body, dia_body)))
        n_id = Proof(after_dia, RuleInstance("id", at, Neq(t, s), target=c), (sub,))
        n_dia = Proof(base.add_child(at, NestedSequent(c, (), (boxed_body,))),
                      RuleInstance("dia", at, dia, target=c), (n_id,))
        return Proof(concl, RuleInstance("box", at, box, child=c), (n_dia,))
    raise TypeError(f"not a formula: {phi!r}")


def eq_grp(p: Proof, at: str, t: Term, s: Term, phi: Formula, z: Term, cfg: CalculusConfig,
           stats: "CutStats | None" = None) -> Proof:
    """From ``G{t != s, phi(t/z), phi(s/z)}`` to ``G{t != s, phi(t/z)}`` (via cut elimination)."""
    ps = substitute(phi, s, z)
    pt = substitute(phi, t, z)
    c = p.conclusion.component(at).formulas
    if Neq(t, s) not in c or pt not in c or ps not in c:
        raise TransformError("conclusion lacks t != s, phi(t/z) or phi(s/z)")
    ctx = p.conclusion.remove_formula(at, ps)
    other = eq_replacement(ctx.remove_formula(at, pt).remove_formula(at, Neq(t, s)), at, t, s, phi, z)
    return eliminate_cut(ctx, at, ps, p, other, cfg, stats)


# ------------------------------------------------------- cut elimination

@dataclass
class CutStats:
    calls: int = 0
    measures: list[tuple[int, int]] = field(default_factory=list)
    cases: dict[str, int] = field(default_factory=dict)

    def note(self, case: str) -> None:
        self.cases[case] = self.cases.get(case, 0) + 1


def _find_ax(g: NestedSequent) -> RuleInstance | None:
    for c in g.components():
        fs = set(c.formulas)
        for f in c.formulas:
            if is_literal(f) and negate(f) in fs:
                return RuleInstance("ax", c.name, f)
    return None


def _principal(inst: RuleInstance, at: str, phi: Formula) -> bool:
    return inst.at == at and (inst.formula == phi or inst.aux == phi)


def eliminate_cut(g: NestedSequent, at: str, phi: Formula, p1: Proof, p2: Proof,
                  cfg: CalculusConfig, stats: CutStats | None = None) -> Proof:
    """Cut-free proof of ``g`` from cut-free proofs of ``g{phi}`` and ``g{~phi}`` (at ``at``)."""
    if p1.conclusion != g.add_formula(at, phi):
        raise TransformError("left premise does not prove g extended by phi")
    if p2.conclusion != g.add_formula(at, negate(phi)):
        raise TransformError("right premise does not prove g extended by ~phi")
    stats = stats if stats is not None else CutStats()
    return _cut(g, at, phi, p1, p2, cfg, stats, None)


def _cut(g: NestedSequent, at: str, phi: Formula, p1: Proof, p2: Proof, cfg: CalculusConfig,
         stats: CutStats, bound: tuple[int, int] | None) -> Proof:
    measure = (length(phi), p1.height + p2.height)
    if bound is not None and not measure < bound:
        raise CutMeasureError(f"measure {measure} does not decrease below {bound}")
    stats.calls += 1
    stats.measures.append(measure)
    nphi = negate(phi)
    comp = g.component(at)
    rec = lambda g_, at_, f_, a_, b_: _cut(g_, at_, f_, a_, b_, cfg, stats, measure)  # noqa: E731

    # the cut formula already occurs in the context: contract it away
    if phi in comp.formulas:
        stats.note("context-left")
        return contract(p1, at, phi)
    if nphi in comp.formulas:
        stats.note("context-right")
        return contract(p2, at, nphi)

    r1, r2 = p1.instance, p2.instance
    # (1) an initial sequent
    if r1.rule == "ax" or r2.rule == "ax":
        ax = _find_ax(g)
        if ax is not None:
            stats.note("axiom")
            return Proof(g, ax)
        # the axiom uses the cut formula, so its complement is in g, handled above
        raise TransformError("inconsistent axiom case")

    # (2) the cut formula is not principal on one side: permute upwards
    for side, (pa, pb, f) in enumerate(((p1, p2, phi), (p2, p1, nphi))):
        r = pa.instance
        if _principal(r, at, f):
            continue
        stats.note("permute-" + r.rule)
        prems = premises_of(g, r, cfg)
        subs = []
        for i, pg in enumerate(prems):
            other = invert(pb, r, i)
            left, right = (pa.premises[i], other) if side == 0 else (other, pa.premises[i])
            subs.append(rec(pg, at, phi, left, right))
        return Proof(g, r, tuple(subs))

    # (3) principal on both sides
    stats.note("principal-" + r1.rule)
    if r1.rule == "or" and r2.rule == "and":
        a, b = phi.left, phi.right
        step = rec(g.add_formula(at, b), at, a, p1.premises[0], weaken(p2.premises[0], at, b))
        return rec(g, at, b, step, p2.premises[1])
    if r1.rule == "and" and r2.rule == "or":
        a, b = phi.left, phi.right
        nb = negate(b)
        step = rec(g.add_formula(at, nb), at, a, weaken(p1.premises[0], at, nb), p2.premises[0])
        return rec(g, at, b, p1.premises[1], step)
    if r1.rule == "forall" and r2.rule == "exists":
        t = r2.term
        inst_neg = substitute(nphi.body, t, nphi.var)
        left = rec(g.add_formula(at, inst_neg), at, phi, weaken(p1, at, inst_neg), p2.premises[0])
        right = term_contract(subst_proof(p1.premises[0], t, r1.fresh), at, t)
        return rec(g, at, negate(inst_neg), right, left)
    if r1.rule == "exists" and r2.rule == "forall":
        t = r1.term
        inst_pos = substitute(phi.body, t, phi.var)
        left = rec(g.add_formula(at, inst_pos), at, phi, p1.premises[0], weaken(p2, at, inst_pos))
        right = term_contract(subst_proof(p2.premises[0], t, r2.fresh), at, t)
        return rec(g, at, inst_pos, left, right)
    if r1.rule == "box" and r2.rule == "dia":
        u = r2.target
        psi = phi.body
        left = rec(g.add_formula(u, negate(psi)), at, phi, weaken(p1, u, negate(psi)), p2.premises[0])
        right = shift(p1.premises[0], at, u, r1.child, cfg)
        return rec(g, u, psi, right, left)
    if r1.rule == "dia" and r2.rule == "box":
        u = r1.target
        psi = phi.body
        left = rec(g.add_formula(u, psi), at, phi, p1.premises[0], weaken(p2, u, psi))
        right = shift(p2.premises[0], at, u, r2.child, cfg)
        return rec(g, u, psi, left, right)
    raise TransformError(f"unexpected principal pair {r1.rule}/{r2.rule}")
