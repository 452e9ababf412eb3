"""Finite Kripke models with outer universe and inner domains.

Quantifiers range over the inner domain of the current world; terms are
valued in the outer universe and constants are rigid (one table for all
worlds).  Frame conditions are checked on the relation as a boolean matrix.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .grammar import parse_path_condition
from .sequent import NestedSequent
from .syntax import (
    And, Atom, Box, Dia, Eq, Exists, Forall, Formula, NegAtom, Neq, Or, Term,
)

__all__ = [
    "Model", "Assignment", "FrameConditions", "FrameReport", "SearchSpaceTooLarge",
    "satisfies", "satisfies_sequent", "check_frame", "falsifiable_on",
    "model_to_json", "model_from_json", "model_to_dot", "MAX_WORLDS", "MAX_UNIVERSE",
]

MAX_WORLDS = 6
MAX_UNIVERSE = 5
MAX_COMBINATIONS = 5_000_000


class SearchSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FrameConditions:
    """A set of frame conditions, closed under ``classical => increasing, decreasing, nonempty``."""

    serial: bool = False
    paths: frozenset[tuple[int, int]] = frozenset()
    increasing: bool = False
    decreasing: bool = False
    classical: bool = False
    nonempty: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", frozenset((int(n), int(k)) for n, k in self.paths))
        for n, k in self.paths:
            if n < 0 or k < 0:
                raise ValueError(f"G({n},{k}) needs non-negative indices")
        if self.classical:
            for f in ("increasing", "decreasing", "nonempty"):
                object.__setattr__(self, f, True)

    @classmethod
    def parse(cls, text: str) -> "FrameConditions":
        """Parse ``"D,G(1,1),ID,DD,CD,NE"``; the empty string means no conditions."""
        items: list[str] = []
        depth = 0
        cur = ""
        for ch in text:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "," and depth == 0:
                items.append(cur)
                cur = ""
            else:
                cur += ch
        items.append(cur)
        kw: dict = {"paths": set()}
        names = {"D": "serial", "ID": "increasing", "DD": "decreasing", "CD": "classical", "NE": "nonempty"}
        for raw in items:
            item = raw.strip()
            if not item:
                continue
            if item.upper() in names:
                kw[names[item.upper()]] = True
            elif item.upper().startswith("G"):
                kw["paths"].add(parse_path_condition(item.upper()))
            else:
                raise ValueError(f"unknown frame condition {item!r}")
        return cls(**kw)

    def __str__(self) -> str:
        out = []
        if self.serial:
            out.append("D")
        out += [f"G({n},{k})" for n, k in sorted(self.paths)]
        for flag, name in ((self.increasing, "ID"), (self.decreasing, "DD"),
                           (self.classical, "CD"), (self.nonempty, "NE")):
            if flag:
                out.append(name)
        return ",".join(out)


@dataclass(frozen=True)
class Model:
    worlds: tuple[str, ...]
    relation: frozenset[tuple[str, str]]
    universe: tuple[str, ...]
    domains: Mapping[str, frozenset[str]]
    predicates: Mapping[str, Mapping[str, frozenset[tuple[str, ...]]]] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "relation", frozenset(tuple(p) for p in self.relation))
        object.__setattr__(self, "domains", {w: frozenset(self.domains.get(w, ())) for w in self.worlds})
        object.__setattr__(self, "predicates", {
            w: {p: frozenset(tuple(x) for x in ext) for p, ext in self.predicates.get(w, {}).items()}
            for w in self.worlds})
        object.__setattr__(self, "constants", dict(self.constants))
        if not self.worlds or not self.universe:
            raise ValueError("a model needs at least one world and one element")
        ws, us = set(self.worlds), set(self.universe)
        if len(ws) != len(self.worlds) or len(us) != len(self.universe):
            raise ValueError("duplicate world or element")
        for u, v in self.relation:
            if u not in ws or v not in ws:
                raise ValueError(f"relation pair ({u},{v}) outside the worlds")
        for w, d in self.domains.items():
            if not d <= us:
                raise ValueError(f"domain of {w} is not inside the universe")
        arity: dict[str, int] = {}
        for w, preds in self.predicates.items():
            for p, ext in preds.items():
                for tup in ext:
                    if arity.setdefault(p, len(tup)) != len(tup):
                        raise ValueError(f"predicate {p} has tuples of different lengths")
                    if not set(tup) <= us:
                        raise ValueError(f"extension of {p} at {w} leaves the universe")
        for c, o in self.constants.items():
            if o not in us:
                raise ValueError(f"constant {c} denotes {o!r} outside the universe")

    def successors(self, w: str) -> list[str]:
        return [v for v in self.worlds if (w, v) in self.relation]

    def matrix(self) -> np.ndarray:
        idx = {w: i for i, w in enumerate(self.worlds)}
        m = np.zeros((len(self.worlds), len(self.worlds)), dtype=bool)
        for u, v in self.relation:
            m[idx[u], idx[v]] = True
        return m

    def holds(self, w: str, pred: str, args: tuple[str, ...]) -> bool:
        return args in self.predicates[w].get(pred, frozenset())


@dataclass(frozen=True)
class Assignment:
    """Total map from variables to the universe: explicit values plus a default."""

    values: Mapping[str, str]
    default: str

    def __call__(self, name: str) -> str:
        return self.values.get(name, self.default)

    def updated(self, name: str, value: str) -> "Assignment":
        vals = dict(self.values)
        vals[name] = value
        return Assignment(vals, self.default)


def _denote(m: Model, sigma: Assignment, t: Term) -> str:
    if t.is_var:
        return sigma(t.name)
    try:
        return m.constants[t.name]
    except KeyError:
        raise ValueError(f"constant {t.name!r} has no denotation") from None


def satisfies(m: Model, w: str, sigma: Assignment, phi: Formula) -> bool:
    match phi:
        case Atom(p, args):
            return m.holds(w, p, tuple(_denote(m, sigma, t) for t in args))
        case NegAtom(p, args):
            return not m.holds(w, p, tuple(_denote(m, sigma, t) for t in args))
        case Eq(l, r):
            return _denote(m, sigma, l) == _denote(m, sigma, r)
        case Neq(l, r):
            return _denote(m, sigma, l) != _denote(m, sigma, r)
        case Or(l, r):
            return satisfies(m, w, sigma, l) or satisfies(m, w, sigma, r)
        case And(l, r):
            return satisfies(m, w, sigma, l) and satisfies(m, w, sigma, r)
        case Exists(v, b):
            return any(satisfies(m, w, sigma.updated(v, o), b) for o in sorted(m.domains[w]))
        case Forall(v, b):
            return all(satisfies(m, w, sigma.updated(v, o), b) for o in sorted(m.domains[w]))
        case Dia(b):
            return any(satisfies(m, u, sigma, b) for u in m.successors(w))
        case Box(b):
            return all(satisfies(m, u, sigma, b) for u in m.successors(w))
    raise TypeError(f"not a formula: {phi!r}")


def satisfies_sequent(m: Model, sigma: Assignment, iota: Mapping[str, str], g: NestedSequent) -> bool:
    """If iota respects the tree and signatures lie in inner domains, some formula holds."""
    for u, v in g.tree_edges():
        if (iota[u], iota[v]) not in m.relation:
            return True
    for c in g.components():
        dom = m.domains[iota[c.name]]
        if any(_denote(m, sigma, t) not in dom for t in c.terms):
            return True
    return any(satisfies(m, iota[c.name], sigma, f) for c in g.components() for f in c.formulas)


@dataclass(frozen=True)
class FrameReport:
    results: Mapping[str, bool]

    def __bool__(self) -> bool:
        return all(self.results.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.results.items() if not v]


def _power(r: np.ndarray, n: int) -> np.ndarray:
    out = np.eye(r.shape[0], dtype=bool)
    for _ in range(n):
        out = (out.astype(np.int64) @ r.astype(np.int64)) > 0
    return out


def check_frame(m: Model, c: FrameConditions) -> FrameReport:
    r = m.matrix()
    res: dict[str, bool] = {}
    if c.serial:
        res["D"] = bool(r.any(axis=1).all())
    for n, k in sorted(c.paths):
        # w R^n u and w R^k v imply u R v
        implied = (_power(r, n).T.astype(np.int64) @ _power(r, k).astype(np.int64)) > 0
        res[f"G({n},{k})"] = bool(not (implied & ~r).any())
    pairs = [(u, v) for (u, v) in m.relation]
    if c.increasing:
        res["ID"] = all(m.domains[u] <= m.domains[v] for u, v in pairs)
    if c.decreasing:
        res["DD"] = all(m.domains[v] <= m.domains[u] for u, v in pairs)
    if c.classical:
        res["CD"] = all(m.domains[w] == frozenset(m.universe) for w in m.worlds)
    if c.nonempty:
        res["NE"] = all(m.domains[w] for w in m.worlds)
    return FrameReport(res)


def _iotas(m: Model, g: NestedSequent) -> Iterator[dict[str, str]]:
    """Interpretations of component names that map tree edges into R."""
    order = g.names()
    parent = {w: u for u, w in g.tree_edges()}

    def rec(i: int, cur: dict[str, str]) -> Iterator[dict[str, str]]:
        if i == len(order):
            yield dict(cur)
            return
        name = order[i]
        cands = m.successors(cur[parent[name]]) if name in parent else list(m.worlds)
        for w in cands:
            cur[name] = w
            yield from rec(i + 1, cur)
        cur.pop(name, None)

    yield from rec(0, {})


def falsifiable_on(m: Model, g: NestedSequent, c: FrameConditions | None = None,
                   ) -> tuple[Assignment, dict[str, str]] | None:
    """Exhaustively search for (sigma, iota) falsifying ``g`` on ``m``.

    Only the free variables of ``g`` are enumerated; every other variable
    takes the first element of the universe.
    """
    if c is not None and not check_frame(m, c):
        raise ValueError("model violates the frame conditions: " + ", ".join(check_frame(m, c).failures()))
    if len(m.worlds) > MAX_WORLDS or len(m.universe) > MAX_UNIVERSE:
        raise SearchSpaceTooLarge(
            f"exhaustive check limited to {MAX_WORLDS} worlds and {MAX_UNIVERSE} elements")
    fv = sorted(t.name for t in g.free_vars())
    names = g.names()
    combos = len(m.universe) ** len(fv) * len(m.worlds) ** len(names)
    if combos > MAX_COMBINATIONS:
        raise SearchSpaceTooLarge(f"{combos} candidate (assignment, interpretation) pairs")
    for iota in _iotas(m, g):
        for vals in itertools.product(m.universe, repeat=len(fv)):
            sigma = Assignment(dict(zip(fv, vals)), m.universe[0])
            if not satisfies_sequent(m, sigma, iota, g):
                return sigma, iota
    return None


# ------------------------------------------------------------------- I/O

def model_to_json(m: Model) -> dict:
    return {
        "worlds": list(m.worlds),
        "relation": sorted([list(p) for p in m.relation]),
        "universe": list(m.universe),
        "domains": {w: sorted(m.domains[w]) for w in m.worlds},
        "predicates": {w: {p: sorted(list(t) for t in ext) for p, ext in sorted(m.predicates[w].items())}
                       for w in m.worlds},
        "constants": dict(sorted(m.constants.items())),
    }


def model_from_json(data: dict | str) -> Model:
    if isinstance(data, str):
        data = json.loads(data)
    return Model(
        worlds=tuple(data["worlds"]),
        relation=frozenset(tuple(p) for p in data.get("relation", ())),
        universe=tuple(data["universe"]),
        domains={w: frozenset(d) for w, d in data.get("domains", {}).items()},
        predicates={w: {p: frozenset(tuple(t) for t in ext) for p, ext in ps.items()}
                    for w, ps in data.get("predicates", {}).items()},
        constants=dict(data.get("constants", {})),
    )


def model_to_dot(m: Model) -> str:
    lines = ["digraph model {"]
    for w in m.worlds:
        dom = ", ".join(sorted(m.domains[w]))
        facts = "; ".join(p + (f"({','.join(t)})" if t else "") for p, ext in sorted(m.predicates[w].items())
                          for t in sorted(ext))
        lines.append(f'  "{w}" [label="{w}\\nD={{{dom}}}\\n{facts}"];')
    for u, v in sorted(m.relation):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
