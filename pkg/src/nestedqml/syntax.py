"""Terms and negation-normal-form formulas of first-order modal logic with equality.

Formulas are immutable.  Equality and hashing are up to renaming of bound
variables: two formulas compare equal iff their canonical keys (bound
variables replaced by binding depth) coincide.

Lexical conventions shared by the printer and the parser:

* a term identifier starting with ``u``-``z`` or ``_`` is a variable, any
  other identifier is a constant; ``'name`` always denotes a constant;
* predicate symbols start with an upper-case letter (after optional
  underscores);
* names beginning with ``_`` are reserved for machine-generated symbols
  (fresh variables ``_v<n>``, reservoir constants, the falsum predicate).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

__all__ = [
    "Term", "Var", "Const", "Formula", "Atom", "NegAtom", "Eq", "Neq", "Or",
    "And", "Exists", "Forall", "Dia", "Box", "negate", "free_vars",
    "free_terms", "substitute", "alpha_equal", "length", "is_literal",
    "is_negative_literal", "literal_args", "with_literal_args", "existence",
    "bottom", "top", "is_bottom", "is_top", "disjunction", "fresh_var",
    "FreshSupply", "predicate_arities", "format_term", "format_formula",
    "term_order_key", "FALSUM", "is_var_name", "parse_formula", "parse_term",
]

FALSUM = "_Falsum"

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_VAR_START = set("uvwxyz_")


def is_var_name(name: str) -> bool:
    """True iff a bare identifier lexes as a variable."""
    return bool(_IDENT.match(name)) and name[0] in _VAR_START


@dataclass(frozen=True, order=True)
class Term:
    kind: str  # "var" or "const"
    name: str

    def __post_init__(self) -> None:
        if self.kind not in ("var", "const"):
            raise ValueError(f"bad term kind {self.kind!r}")
        if not _IDENT.match(self.name):
            raise ValueError(f"bad term name {self.name!r}")
        if self.kind == "var" and not is_var_name(self.name):
            raise ValueError(f"{self.name!r} is not a variable name")

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    def __str__(self) -> str:
        return format_term(self)

    def __repr__(self) -> str:
        return f"{'Var' if self.is_var else 'Const'}({self.name!r})"


def Var(name: str) -> Term:
    return Term("var", name)


def Const(name: str) -> Term:
    return Term("const", name)


def term_order_key(t: Term) -> tuple[int, str]:
    """Length-lexicographic order on printed terms."""
    s = format_term(t)
    return (len(s), s)


# ---------------------------------------------------------------- formulas

class Formula:
    """Base class; subclasses are frozen dataclasses without generated eq."""

    @cached_property
    def key(self) -> tuple:
        return _key(self, {}, 0)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Formula) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __str__(self) -> str:
        return format_formula(self)

    def __repr__(self) -> str:
        return f"<{format_formula(self)}>"


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, eq=False, repr=False)
class NegAtom(Formula):
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, eq=False, repr=False)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False, repr=False)
class Neq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False, repr=False)
class Exists(Formula):
    var: str
    body: Formula

    def __post_init__(self) -> None:
        if not is_var_name(self.var):
            raise ValueError(f"cannot bind non-variable {self.var!r}")


@dataclass(frozen=True, eq=False, repr=False)
class Forall(Formula):
    var: str
    body: Formula

    def __post_init__(self) -> None:
        if not is_var_name(self.var):
            raise ValueError(f"cannot bind non-variable {self.var!r}")


@dataclass(frozen=True, eq=False, repr=False)
class Dia(Formula):
    body: Formula


@dataclass(frozen=True, eq=False, repr=False)
class Box(Formula):
    body: Formula


_LITERALS = (Atom, NegAtom, Eq, Neq)
_QUANTS = (Exists, Forall)


def _tkey(t: Term, env: dict[str, int]) -> tuple:
    if t.is_var and t.name in env:
        return ("b", env[t.name])
    return ("v" if t.is_var else "c", t.name)


def _key(phi: Formula, env: dict[str, int], depth: int) -> tuple:
    match phi:
        case Atom(p, args):
            return ("atom", p, tuple(_tkey(t, env) for t in args))
        case NegAtom(p, args):
            return ("neg", p, tuple(_tkey(t, env) for t in args))
        case Eq(l, r):
            return ("eq", _tkey(l, env), _tkey(r, env))
        case Neq(l, r):
            return ("neq", _tkey(l, env), _tkey(r, env))
        case Or(l, r):
            return ("or", _key(l, env, depth), _key(r, env, depth))
        case And(l, r):
            return ("and", _key(l, env, depth), _key(r, env, depth))
        case Exists(v, b) | Forall(v, b):
            inner = dict(env)
            inner[v] = depth
            tag = "exists" if isinstance(phi, Exists) else "forall"
            return (tag, _key(b, inner, depth + 1))
        case Dia(b):
            return ("dia", _key(b, env, depth))
        case Box(b):
            return ("box", _key(b, env, depth))
    raise TypeError(f"not a formula: {phi!r}")


def alpha_equal(a: Formula, b: Formula) -> bool:
    return a.key == b.key


def negate(phi: Formula) -> Formula:
    """The NNF dual: swaps polarity of literals and every connective."""
    match phi:
        case Atom(p, args):
            return NegAtom(p, args)
        case NegAtom(p, args):
            return Atom(p, args)
        case Eq(l, r):
            return Neq(l, r)
        case Neq(l, r):
            return Eq(l, r)
        case Or(l, r):
            return And(negate(l), negate(r))
        case And(l, r):
            return Or(negate(l), negate(r))
        case Exists(v, b):
            return Forall(v, negate(b))
        case Forall(v, b):
            return Exists(v, negate(b))
        case Dia(b):
            return Box(negate(b))
        case Box(b):
            return Dia(negate(b))
    raise TypeError(f"not a formula: {phi!r}")


def length(phi: Formula) -> int:
    """Symbol count; polarity of literals is not counted, so negation preserves it."""
    match phi:
        case Atom(_, args) | NegAtom(_, args):
            return 1 + len(args)
        case Eq() | Neq():
            return 3
        case Or(l, r) | And(l, r):
            return 1 + length(l) + length(r)
        case Exists(_, b) | Forall(_, b):
            return 2 + length(b)
        case Dia(b) | Box(b):
            return 1 + length(b)
    raise TypeError(f"not a formula: {phi!r}")


def is_literal(phi: Formula) -> bool:
    return isinstance(phi, _LITERALS)


def is_negative_literal(phi: Formula) -> bool:
    return isinstance(phi, (NegAtom, Neq))


def literal_args(phi: Formula) -> tuple[Term, ...]:
    if isinstance(phi, (Atom, NegAtom)):
        return phi.args
    if isinstance(phi, (Eq, Neq)):
        return (phi.left, phi.right)
    raise TypeError(f"not a literal: {phi}")


def with_literal_args(phi: Formula, args: Iterable[Term]) -> Formula:
    args = tuple(args)
    if isinstance(phi, (Atom, NegAtom)):
        return type(phi)(phi.pred, args)
    if isinstance(phi, (Eq, Neq)):
        left, right = args
        return type(phi)(left, right)
    raise TypeError(f"not a literal: {phi}")


# ------------------------------------------------------------ variables

def _free(phi: Formula, bound: frozenset[str], out: set[Term], consts: bool) -> None:
    match phi:
        case Atom(_, args) | NegAtom(_, args):
            ts: Iterable[Term] = args
        case Eq(l, r) | Neq(l, r):
            ts = (l, r)
        case Or(l, r) | And(l, r):
            _free(l, bound, out, consts)
            _free(r, bound, out, consts)
            return
        case Exists(v, b) | Forall(v, b):
            _free(b, bound | {v}, out, consts)
            return
        case Dia(b) | Box(b):
            _free(b, bound, out, consts)
            return
        case _:
            raise TypeError(f"not a formula: {phi!r}")
    for t in ts:
        if t.is_var:
            if t.name not in bound:
                out.add(t)
        elif consts:
            out.add(t)


def free_vars(phi: Formula) -> frozenset[Term]:
    out: set[Term] = set()
    _free(phi, frozenset(), out, False)
    return frozenset(out)


def free_terms(phi: Formula) -> frozenset[Term]:
    """Free variables together with all constants."""
    out: set[Term] = set()
    _free(phi, frozenset(), out, True)
    return frozenset(out)


def _all_names(phi: Formula, out: set[str]) -> None:
    match phi:
        case Atom(_, args) | NegAtom(_, args):
            out.update(t.name for t in args)
        case Eq(l, r) | Neq(l, r):
            out.update((l.name, r.name))
        case Or(l, r) | And(l, r):
            _all_names(l, out)
            _all_names(r, out)
        case Exists(v, b) | Forall(v, b):
            out.add(v)
            _all_names(b, out)
        case Dia(b) | Box(b):
            _all_names(b, out)


class FreshSupply:
    """Monotone counter minting variables ``_v<n>`` outside the user namespace."""

    def __init__(self, prefix: str = "_v", start: int = 0) -> None:
        self.prefix = prefix
        self._counter = itertools.count(start)

    def var(self, avoid: Iterable[str] | set[str] = ()) -> Term:
        avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
        while True:
            name = f"{self.prefix}{next(self._counter)}"
            if name not in avoid:
                return Var(name)

    def __iter__(self) -> Iterator[Term]:
        while True:
            yield self.var()


_GLOBAL = FreshSupply()


def fresh_var(avoid: Iterable[str] = ()) -> Term:
    """A variable never produced before in this process and not in ``avoid``."""
    return _GLOBAL.var(avoid)


def substitute(phi: Formula, t: Term, x: Term | str) -> Formula:
    """Capture-avoiding replacement of free occurrences of variable ``x`` by ``t``."""
    xname = x.name if isinstance(x, Term) else x
    if isinstance(x, Term) and not x.is_var:
        raise ValueError("can only substitute for variables")
    if Var(xname) not in free_vars(phi):
        return phi
    return _subst(phi, t, xname)


def _subst_term(s: Term, t: Term, x: str) -> Term:
    return t if s.is_var and s.name == x else s


def _subst(phi: Formula, t: Term, x: str) -> Formula:
    match phi:
        case Atom(p, args):
            return Atom(p, tuple(_subst_term(s, t, x) for s in args))
        case NegAtom(p, args):
            return NegAtom(p, tuple(_subst_term(s, t, x) for s in args))
        case Eq(l, r):
            return Eq(_subst_term(l, t, x), _subst_term(r, t, x))
        case Neq(l, r):
            return Neq(_subst_term(l, t, x), _subst_term(r, t, x))
        case Or(l, r):
            return Or(_subst(l, t, x), _subst(r, t, x))
        case And(l, r):
            return And(_subst(l, t, x), _subst(r, t, x))
        case Dia(b):
            return Dia(_subst(b, t, x))
        case Box(b):
            return Box(_subst(b, t, x))
        case Exists(v, b) | Forall(v, b):
            cls = type(phi)
            if v == x or Var(x) not in free_vars(b):
                return phi
            if t.is_var and t.name == v:
                names: set[str] = {x, t.name}
                _all_names(b, names)
                z = fresh_var(names)
                b = _subst(b, z, v)
                v = z.name
            return cls(v, _subst(b, t, x))
    raise TypeError(f"not a formula: {phi!r}")


# ------------------------------------------------------------- sugar

def existence(t: Term) -> Formula:
    """E t, i.e. exists x (x = t) with x distinct from t."""
    v = "x" if not (t.is_var and t.name == "x") else "y"
    return Exists(v, Eq(Var(v), t))


def bottom() -> Formula:
    return And(Atom(FALSUM), NegAtom(FALSUM))


def top() -> Formula:
    return Or(NegAtom(FALSUM), Atom(FALSUM))


def is_bottom(phi: Formula) -> bool:
    return phi == _BOTTOM


def is_top(phi: Formula) -> bool:
    return phi == _TOP


_BOTTOM = bottom()
_TOP = top()


def disjunction(items: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is falsum."""
    items = list(items)
    if not items:
        return bottom()
    out = items[-1]
    for phi in reversed(items[:-1]):
        out = Or(phi, out)
    return out


def predicate_arities(phis: Iterable[Formula]) -> dict[str, int]:
    """Map predicate symbol to arity; raises ValueError on inconsistent use."""
    out: dict[str, int] = {}

    def walk(phi: Formula) -> None:
        match phi:
            case Atom(p, args) | NegAtom(p, args):
                if out.setdefault(p, len(args)) != len(args):
                    raise ValueError(f"predicate {p} used with arities {out[p]} and {len(args)}")
            case Or(l, r) | And(l, r):
                walk(l)
                walk(r)
            case Exists(_, b) | Forall(_, b) | Dia(b) | Box(b):
                walk(b)

    for phi in phis:
        walk(phi)
    return out


# -------------------------------------------------------------- printing

def format_term(t: Term) -> str:
    if t.is_var:
        return t.name
    return t.name if not is_var_name(t.name) else "'" + t.name


def _open_scope(phi: Formula) -> bool:
    """Printed form ends in a quantifier whose scope extends rightwards."""
    while isinstance(phi, (Dia, Box)):
        phi = phi.body
    return isinstance(phi, _QUANTS)


def _binary(phi: Formula) -> bool:
    return isinstance(phi, (Or, And)) and not (is_bottom(phi) or is_top(phi))


def format_formula(phi: Formula) -> str:
    if is_bottom(phi):
        return "false"
    if is_top(phi):
        return "true"
    match phi:
        case Atom(p, args):
            return p + ("(" + ", ".join(map(format_term, args)) + ")" if args else "")
        case NegAtom(p, args):
            return "~" + format_formula(Atom(p, args))
        case Eq(l, r):
            return f"{format_term(l)} = {format_term(r)}"
        case Neq(l, r):
            return f"{format_term(l)} != {format_term(r)}"
        case Or(l, r):
            ls = format_formula(l)
            if isinstance(l, Or) and _binary(l) or _open_scope(l):
                ls = f"({ls})"
            return f"{ls} \\/ {format_formula(r)}"
        case And(l, r):
            ls, rs = format_formula(l), format_formula(r)
            if _binary(l) or _open_scope(l):
                ls = f"({ls})"
            if isinstance(r, Or) and _binary(r):
                rs = f"({rs})"
            return f"{ls} /\\ {rs}"
        case Exists(v, b):
            return f"exists {v}. {format_formula(b)}"
        case Forall(v, b):
            return f"forall {v}. {format_formula(b)}"
        case Dia(b) | Box(b):
            op = "dia" if isinstance(phi, Dia) else "box"
            bs = format_formula(b)
            if _binary(b):
                bs = f"({bs})"
            return f"{op} {bs}"
    raise TypeError(f"not a formula: {phi!r}")


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into an NNF formula (see :mod:`nestedqml.parsing`)."""
    from .parsing import parse_formula as _parse

    return _parse(text)


def parse_term(text: str) -> Term:
    from .parsing import parse_term as _parse

    return _parse(text)
