"""Flat and nested sequents.

A nested sequent is a finite tree of components.  Each component carries a
unique name, a signature (multiset of terms), a multiset of formulas and an
ordered tuple of children.  Equality of sequents is multiset equality of
signatures and formulas (formulas up to alpha-equivalence), matching
children by name.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Iterable, Iterator

from .parsing import parse_sequent_tree
from .reachability import PropGraph
from .syntax import (
    Box, Formula, Or, Term, disjunction, existence, format_formula,
    format_term, free_terms, free_vars, is_bottom, negate, parse_formula, parse_term,
    predicate_arities, substitute,
)

__all__ = [
    "FlatSequent", "NestedSequent", "parse_sequent", "format_sequent",
    "sequent_to_json", "sequent_from_json", "fm", "fresh_name", "singleton",
]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class FlatSequent:
    terms: tuple[Term, ...] = ()
    formulas: tuple[Formula, ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlatSequent):
            return NotImplemented
        return Counter(self.terms) == Counter(other.terms) and Counter(self.formulas) == Counter(other.formulas)

    def __hash__(self) -> int:
        return hash((frozenset(Counter(self.terms).items()), frozenset(Counter(self.formulas).items())))


def _sorted_keys(items: Iterable) -> tuple:
    return tuple(sorted(items))


@dataclass(frozen=True, eq=False)
class NestedSequent:
    name: str
    terms: tuple[Term, ...] = ()
    formulas: tuple[Formula, ...] = ()
    children: tuple["NestedSequent", ...] = ()

    def __post_init__(self) -> None:
        if not _NAME.match(self.name):
            raise ValueError(f"bad component name {self.name!r}")
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "children", tuple(self.children))
        seen: set[str] = set()
        for n in self.names():
            if n in seen:
                raise ValueError(f"duplicate component name {n!r}")
            seen.add(n)

    # ------------------------------------------------------------ identity
    @cached_property
    def canonical(self) -> tuple:
        return (
            self.name,
            _sorted_keys((t.kind, t.name) for t in self.terms),
            _sorted_keys(f.key for f in self.formulas),
            tuple(sorted((c.canonical for c in self.children), key=lambda k: k[0])),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NestedSequent):
            return NotImplemented
        return self is other or self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash(self.canonical)

    def __str__(self) -> str:
        return format_sequent(self)

    def __repr__(self) -> str:
        return f"NestedSequent({format_sequent(self, names=True)!r})"

    # ----------------------------------------------------------- navigation
    def names(self) -> list[str]:
        out = [self.name]
        for c in self.children:
            out.extend(c.names())
        return out

    def components(self) -> Iterator["NestedSequent"]:
        yield self
        for c in self.children:
            yield from c.components()

    @cached_property
    def _index(self) -> dict[str, "NestedSequent"]:
        return {c.name: c for c in self.components()}

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def component(self, name: str) -> "NestedSequent":
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no component named {name!r}") from None

    def flat(self, name: str) -> FlatSequent:
        c = self.component(name)
        return FlatSequent(c.terms, c.formulas)

    def tree_edges(self) -> list[tuple[str, str]]:
        out = []
        for c in self.components():
            out.extend((c.name, d.name) for d in c.children)
        return out

    def parent_of(self, name: str) -> str | None:
        for u, w in self.tree_edges():
            if w == name:
                return u
        if name not in self:
            raise KeyError(name)
        return None

    def prop_graph(self) -> PropGraph:
        return PropGraph.from_tree_edges(
            self.names(), self.tree_edges(), {c.name: c.terms for c in self.components()})

    def size(self) -> int:
        return sum(1 + len(c.terms) + len(c.formulas) for c in self.components())

    # ------------------------------------------------------------- surgery
    def update(self, name: str, fn: Callable[["NestedSequent"], "NestedSequent"]) -> "NestedSequent":
        """Replace the subtree rooted at ``name`` by ``fn(subtree)``."""
        if self.name == name:
            return fn(self)
        for i, c in enumerate(self.children):
            if name in c:
                kids = list(self.children)
                kids[i] = c.update(name, fn)
                return replace(self, children=tuple(kids))
        raise KeyError(f"no component named {name!r}")

    def add_formula(self, name: str, *phis: Formula) -> "NestedSequent":
        return self.update(name, lambda c: replace(c, formulas=c.formulas + tuple(phis)))

    def add_term(self, name: str, *ts: Term) -> "NestedSequent":
        return self.update(name, lambda c: replace(c, terms=c.terms + tuple(ts)))

    def remove_formula(self, name: str, phi: Formula) -> "NestedSequent":
        def drop(c: NestedSequent) -> NestedSequent:
            fs = list(c.formulas)
            for i, f in enumerate(fs):
                if f == phi:
                    del fs[i]
                    return replace(c, formulas=tuple(fs))
            raise KeyError(f"{format_formula(phi)} not in component {name}")
        return self.update(name, drop)

    def remove_term(self, name: str, t: Term) -> "NestedSequent":
        def drop(c: NestedSequent) -> NestedSequent:
            ts = list(c.terms)
            ts.remove(t)
            return replace(c, terms=tuple(ts))
        return self.update(name, drop)

    def add_child(self, name: str, child: "NestedSequent | None" = None,
                  child_name: str | None = None) -> "NestedSequent":
        if child is None:
            child = NestedSequent(child_name or fresh_name(self))
        return self.update(name, lambda c: replace(c, children=c.children + (child,)))

    def remove_child(self, name: str) -> "NestedSequent":
        parent = self.parent_of(name)
        if parent is None:
            raise ValueError("cannot remove the root")
        return self.update(parent, lambda c: replace(c, children=tuple(d for d in c.children if d.name != name)))

    def rename(self, mapping: dict[str, str]) -> "NestedSequent":
        return NestedSequent(mapping.get(self.name, self.name), self.terms, self.formulas,
                             tuple(c.rename(mapping) for c in self.children))

    def map_formulas(self, fn: Callable[[Formula], Formula], terms: Callable[[Term], Term] = lambda t: t) -> "NestedSequent":
        return NestedSequent(self.name, tuple(map(terms, self.terms)), tuple(map(fn, self.formulas)),
                             tuple(c.map_formulas(fn, terms) for c in self.children))

    # ----------------------------------------------------------- variables
    def free_vars(self) -> frozenset[Term]:
        out: set[Term] = set()
        for c in self.components():
            out.update(t for t in c.terms if t.is_var)
            for f in c.formulas:
                out |= free_vars(f)
        return frozenset(out)

    def terms_occurring(self) -> frozenset[Term]:
        """Signature terms, free variables and constants of all components."""
        out: set[Term] = set()
        for c in self.components():
            out.update(c.terms)
            for f in c.formulas:
                out |= free_terms(f)
        return frozenset(out)

    def substitute(self, t: Term, x: Term) -> "NestedSequent":
        """G(t/x) applied to formulas and signatures alike."""
        return self.map_formulas(lambda f: substitute(f, t, x), lambda s: t if s == x else s)


def fresh_name(g: NestedSequent | Iterable[str], prefix: str = "w") -> str:
    """Smallest ``w<k>`` not used as a component name."""
    used = set(g.names()) if isinstance(g, NestedSequent) else set(g)
    k = 0
    while f"{prefix}{k}" in used:
        k += 1
    return f"{prefix}{k}"


# ----------------------------------------------------------------- fm

def fm(g: NestedSequent, simplify: bool = False) -> Formula:
    """Formula interpretation of a nested sequent.

    ``(OR_t ~E t \\/ OR Gamma) \\/ OR_children box fm(child)``; empty parts
    are dropped except that a component with no formulas contributes the
    disjunction of its signature part (falsum when empty).
    """
    sig = [negate(existence(t)) for t in g.terms]
    head = disjunction(sig)
    if g.formulas:
        head = Or(head, disjunction(g.formulas))
    if g.children:
        head = Or(head, disjunction(Box(fm(c, simplify)) for c in g.children))
    return _drop_bottom(head) if simplify else head


def _drop_bottom(phi: Formula) -> Formula:
    if isinstance(phi, Or):
        l, r = _drop_bottom(phi.left), _drop_bottom(phi.right)
        if is_bottom(l):
            return r
        if is_bottom(r):
            return l
        return Or(l, r)
    return phi


# ------------------------------------------------------------- text I/O

def format_sequent(g: NestedSequent, names: bool = False) -> str:
    parts: list[str] = []
    if g.terms:
        parts.append("sig{" + ", ".join(format_term(t) for t in g.terms) + "};")
    items = [format_formula(f) for f in g.formulas]
    items += ["[" + format_sequent(c, names) + "]" for c in g.children]
    body = " ".join(parts + ([", ".join(items)] if items else []))
    if names:
        body = f"{g.name}: {body}" if body else f"{g.name}:"
    return body


def _build(tree: tuple, used: set[str], counter: list[int]) -> NestedSequent:
    name, terms, formulas, children = tree
    if name is None:
        while f"w{counter[0]}" in used:
            counter[0] += 1
        name = f"w{counter[0]}"
        used.add(name)
    kids = tuple(_build(c, used, counter) for c in children)
    return NestedSequent(name, tuple(terms), tuple(formulas), kids)


def _explicit_names(tree: tuple, out: list[str]) -> None:
    if tree[0] is not None:
        out.append(tree[0])
    for c in tree[3]:
        _explicit_names(c, out)


def parse_sequent(text: str) -> NestedSequent:
    """Parse text such as ``sig{a}; P(a), [sig{}; Q]``; unnamed components get ``w0, w1, ...``."""
    tree = parse_sequent_tree(text)
    explicit: list[str] = []
    _explicit_names(tree, explicit)
    if len(set(explicit)) != len(explicit):
        raise ValueError("duplicate component name in sequent text")
    g = _build(tree, set(explicit), [0])
    predicate_arities(f for c in g.components() for f in c.formulas)
    return g


def sequent_to_json(g: NestedSequent) -> dict:
    return {
        "name": g.name,
        "signature": [format_term(t) for t in g.terms],
        "formulas": [format_formula(f) for f in g.formulas],
        "children": [sequent_to_json(c) for c in g.children],
    }


def sequent_from_json(data: dict | str) -> NestedSequent:
    if isinstance(data, str):
        data = json.loads(data)
    return NestedSequent(
        data["name"],
        tuple(parse_term(t) for t in data.get("signature", ())),
        tuple(parse_formula(f) for f in data.get("formulas", ())),
        tuple(sequent_from_json(c) for c in data.get("children", ())),
    )


def singleton(phi: Formula, name: str = "w0") -> NestedSequent:
    """The sequent consisting of one formula in a root component."""
    return NestedSequent(name, (), (phi,))

