"""Formulas: negation, substitution, free variables, length and the parser."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from helpers import random_formula, random_term
from nestedqml.parsing import ParseError
from nestedqml.syntax import (
    And, Atom, Box, Const, Dia, Eq, Exists, Forall, NegAtom, Neq, Or, Var, alpha_equal,
    format_formula, free_vars, length, negate, parse_formula, substitute,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
x, y, z = Var("x"), Var("y"), Var("z")
a = Const("a")


def test_negate_literals_and_duals():
    assert negate(Atom("P", (x,))) == NegAtom("P", (x,))
    assert negate(Eq(x, y)) == Neq(x, y)
    p = Atom("P", (x,))
    assert negate(Box(p)) == Dia(negate(p))
    assert negate(Forall("x", p)) == Exists("x", negate(p))
    assert negate(And(p, Atom("Q"))) == Or(negate(p), NegAtom("Q"))


def test_substitute_renames_to_avoid_capture():
    phi = Forall("y", Atom("R", (x, y)))
    out = substitute(phi, y, x)
    assert isinstance(out, Forall) and out.var != "y"
    assert free_vars(out) == {y}
    assert alpha_equal(out, parse_formula("forall u. R(y, u)"))


def test_substitute_trivial_cases():
    assert substitute(Atom("P", (x,)), a, x) == Atom("P", (a,))
    phi = Forall("x", Atom("P", (x,)))
    assert alpha_equal(substitute(phi, a, x), phi)


def test_free_vars_examples():
    assert free_vars(parse_formula("forall x. R(x, y)")) == {y}
    assert free_vars(Eq(x, y)) == {x, y}
    assert free_vars(parse_formula("exists x. x = a")) == frozenset()


def test_parse_examples():
    assert parse_formula("forall x. box P(x)") == Forall("x", Box(Atom("P", (x,))))
    assert parse_formula("~(P(a))") == NegAtom("P", (a,))
    assert parse_formula("dia (P \\/ Q) -> box Q") == Or(
        Box(And(NegAtom("P"), NegAtom("Q"))), Box(Atom("Q")))
    assert parse_formula("∀x. □P(x)") == parse_formula("forall x. box P(x)")


@pytest.mark.parametrize("text", ["forall . P", "P(x", "P /\\", "x", "forall a. P(a)", "P(x) Q"])
def test_parse_errors_carry_a_position(text):
    with pytest.raises(ParseError) as info:
        parse_formula(text)
    assert 0 <= info.value.pos <= len(text)


@given(seeds)
def test_print_parse_roundtrip(seed):
    phi = random_formula(random.Random(seed), depth=4)
    assert alpha_equal(parse_formula(format_formula(phi)), phi)


@given(seeds)
def test_negate_is_an_involution(seed):
    phi = random_formula(random.Random(seed), depth=4)
    assert alpha_equal(negate(negate(phi)), phi)


@given(seeds)
def test_substitution_commutes_with_negation(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, depth=4)
    t, v = random_term(rng), Var(rng.choice("xyz"))
    assert alpha_equal(negate(substitute(phi, t, v)), substitute(negate(phi), t, v))


@given(seeds)
def test_substitution_removes_the_variable(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, depth=4)
    v = Var(rng.choice("xyz"))
    out = substitute(phi, a, v)
    assert v not in free_vars(out)
    assert free_vars(out) == free_vars(phi) - {v}


@given(seeds)
def test_length_decreases_and_is_negation_invariant(seed):
    phi = random_formula(random.Random(seed), depth=4)
    assert length(negate(phi)) == length(phi)
    for sub in _children(phi):
        assert length(sub) < length(phi)


def _children(phi):
    if isinstance(phi, (Or, And)):
        return [phi.left, phi.right]
    if isinstance(phi, (Exists, Forall, Box, Dia)):
        return [phi.body]
    return []


def test_alpha_equality_ignores_bound_names():
    assert alpha_equal(parse_formula("forall x. P(x)"), parse_formula("forall y. P(y)"))
    assert not alpha_equal(parse_formula("forall x. R(x, y)"), parse_formula("forall y. R(y, y)"))
