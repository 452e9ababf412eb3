"""Recursive-descent parser for formulas, terms and nested sequents.

Concrete syntax (ASCII, with Unicode alternatives)::

    phi ::= phi -> phi | phi <-> phi | phi \\/ phi | phi /\\ phi
          | ~phi | box phi | dia phi | forall x y. phi | exists x. phi
          | P | P(t, ..) | t = s | t != s | true | false | (phi)

Implication, equivalence and ``~`` are eliminated at parse time into
negation normal form.  Quantifier scope extends as far right as possible.

Sequents::

    seq  ::= [name ':'] ['sig' '{' terms '}' [';']] item (',' item)*
    item ::= phi | '[' seq ']'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    And, Atom, Const, Eq, Exists, Forall, Formula, Box, Dia, Neq, Or, Term, Var,
    bottom, negate, predicate_arities, top, is_var_name,
)

__all__ = ["ParseError", "parse_formula", "parse_term", "parse_sequent_tree"]


class ParseError(ValueError):
    """Syntax error annotated with a character offset."""

    def __init__(self, message: str, pos: int, text: str = "") -> None:
        self.pos = pos
        self.text = text
        where = f" at position {pos}"
        if text:
            lo = max(0, pos - 20)
            where += f" near {text[lo:pos + 20]!r}"
        super().__init__(message + where)


_UNICODE = {
    "∀": "forall", "∃": "exists", "□": "box", "◇": "dia", "◊": "dia",
    "¬": "~", "∧": "/\\", "∨": "\\/", "⊃": "->", "→": "->", "≡": "<->",
    "↔": "<->", "≠": "!=", "⊥": "false", "⊤": "true",
}

_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|\\/|/\\|!=|[=~(),.\[\]{};:])"
    r"|(?P<ident>'?[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<uni>[∀∃□◇◊¬∧∨⊃→≡↔≠⊥⊤]))"
)

_KEYWORDS = {"forall", "exists", "box", "dia", "true", "false", "sig"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "op", "ident", "kw", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        start = m.start(m.lastgroup)
        val = m.group(m.lastgroup)
        if m.lastgroup == "uni":
            val = _UNICODE[val]
            kind = "kw" if val in _KEYWORDS else "op"
        elif m.lastgroup == "ident":
            kind = "kw" if val in _KEYWORDS else "ident"
        else:
            kind = "op"
        toks.append(_Tok(kind, val, start))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


def _is_pred(name: str) -> bool:
    stripped = name.lstrip("_")
    return bool(stripped) and stripped[0].isupper() and not name.startswith("'")


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.pos, self.text)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "kw") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r} but found {found!r}", tok)
        return tok

    def at_end(self) -> bool:
        return self.tok.kind == "end"

    # -- terms
    def term(self, bound: frozenset[str]) -> Term:
        tok = self.tok
        if tok.kind != "ident" or _is_pred(tok.text):
            raise self.error(f"expected a term but found {tok.text or 'end of input'!r}")
        self.i += 1
        name = tok.text
        if name.startswith("'"):
            return Const(name[1:])
        if name in bound or is_var_name(name):
            return Var(name)
        return Const(name)

    # -- formulas
    def formula(self, bound: frozenset[str]) -> Formula:
        lhs = self.disj(bound)
        if self.accept("->"):
            rhs = self.formula(bound)
            return Or(negate(lhs), rhs)
        if self.accept("<->"):
            rhs = self.formula(bound)
            return And(Or(negate(lhs), rhs), Or(negate(rhs), lhs))
        return lhs

    def disj(self, bound: frozenset[str]) -> Formula:
        lhs = self.conj(bound)
        if self.accept("\\/"):
            return Or(lhs, self.disj(bound))
        return lhs

    def conj(self, bound: frozenset[str]) -> Formula:
        lhs = self.unary(bound)
        if self.accept("/\\"):
            return And(lhs, self.conj(bound))
        return lhs

    def unary(self, bound: frozenset[str]) -> Formula:
        tok = self.tok
        if self.accept("~"):
            return negate(self.unary(bound))
        if self.accept("box"):
            return Box(self.unary(bound))
        if self.accept("dia"):
            return Dia(self.unary(bound))
        if tok.kind == "kw" and tok.text in ("forall", "exists"):
            self.i += 1
            names = []
            while self.tok.kind == "ident":
                vt = self.tok
                if not is_var_name(vt.text):
                    raise self.error(f"{vt.text!r} cannot be bound: not a variable name", vt)
                names.append(vt.text)
                self.i += 1
            if not names:
                raise self.error("expected a bound variable")
            self.expect(".")
            body = self.formula(bound | set(names))
            cls = Forall if tok.text == "forall" else Exists
            for v in reversed(names):
                body = cls(v, body)
            return body
        if self.accept("true"):
            return top()
        if self.accept("false"):
            return bottom()
        if self.accept("("):
            inner = self.formula(bound)
            self.expect(")")
            return inner
        if tok.kind == "ident" and _is_pred(tok.text):
            self.i += 1
            args: list[Term] = []
            if self.accept("("):
                if not self.accept(")"):
                    args.append(self.term(bound))
                    while self.accept(","):
                        args.append(self.term(bound))
                    self.expect(")")
            return Atom(tok.text, tuple(args))
        if tok.kind == "ident":
            left = self.term(bound)
            op = self.tok
            if self.accept("="):
                return Eq(left, self.term(bound))
            if self.accept("!="):
                return Neq(left, self.term(bound))
            raise self.error(f"expected '=' or '!=' after term but found {op.text or 'end of input'!r}", op)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    # -- sequents: returns a raw tree (name|None, terms, formulas, children)
    def component(self) -> tuple:
        name = None
        if self.tok.kind == "ident" and self.peek().kind == "op" and self.peek().text == ":":
            name = self.tok.text
            self.i += 2
        terms: list[Term] = []
        formulas: list[Formula] = []
        children: list[tuple] = []
        if self.accept("sig"):
            self.expect("{")
            if not self.accept("}"):
                terms.append(self.term(frozenset()))
                while self.accept(","):
                    terms.append(self.term(frozenset()))
                self.expect("}")
            self.accept(";")
        if self.tok.kind == "end" or (self.tok.kind == "op" and self.tok.text == "]"):
            return (name, terms, formulas, children)
        while True:
            if self.accept("["):
                children.append(self.component())
                self.expect("]")
            else:
                formulas.append(self.formula(frozenset()))
            if not self.accept(","):
                break
        return (name, terms, formulas, children)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    phi = p.formula(frozenset())
    if not p.at_end():
        raise p.error(f"unexpected trailing input {p.tok.text!r}")
    try:
        predicate_arities([phi])
    except ValueError as exc:
        raise ParseError(str(exc), 0, text) from None
    return phi


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term(frozenset())
    if not p.at_end():
        raise p.error(f"unexpected trailing input {p.tok.text!r}")
    return t


def parse_sequent_tree(text: str) -> tuple:
    """Parse sequent text into a raw (name, terms, formulas, children) tree."""
    p = _Parser(text)
    tree = p.component()
    if not p.at_end():
        raise p.error(f"unexpected {p.tok.text!r}")
    return tree
