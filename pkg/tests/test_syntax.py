from __future__ import annotations

import pytest
from hypothesis import given

from conftest import formulas
from oracles import ShuntingYard
from selframe.syntax import (
    BOT, TOP, And, ConsequencePair, Cto, Or, ParseError, Prop, TheoryGamma,
    atoms, big_and, conjuncts, depth, parse_formula, parse_pair, print_formula,
    print_pair, subformulas, substitute,
)

p, q, r = Prop("p"), Prop("q"), Prop("r")


def test_parse_examples():
    assert parse_formula("p ~> (q /\\ r)") == Cto(p, And(q, r))
    assert parse_formula("T") == TOP
    assert parse_formula("F") == BOT
    assert parse_formula("p /\\ q \\/ r") == Or(And(p, q), r)


def test_associativity():
    assert parse_formula("p ~> q ~> r") == Cto(p, Cto(q, r))
    assert parse_formula("p /\\ q /\\ r") == And(And(p, q), r)
    assert parse_formula("p \\/ q \\/ r") == Or(Or(p, q), r)
    assert parse_formula("p \\/ q ~> r /\\ p") == Cto(Or(p, q), And(r, p))


@pytest.mark.parametrize("text", [
    "p /\\ q \\/ r", "p ~> q ~> r", "(p ~> q) ~> r", "p \\/ (q /\\ r) ~> T",
    "x1 /\\ (y_2 \\/ F) ~> (p ~> q) /\\ r", "((p))",
])
def test_matches_precedence_oracle(text):
    assert parse_formula(text) == ShuntingYard(text).parse()


def test_parse_pair():
    assert parse_pair("p |- T") == ConsequencePair(p, TOP)
    assert parse_pair("p /\\ (p ~> q) |- q") == ConsequencePair(And(p, Cto(p, q)), q)


@pytest.mark.parametrize("text, msg", [
    ("|- p", "expected a formula"),
    ("p q |- p", "expected '|-'"),
    ("p", "missing '|-'"),
    ("p |- q |- r", "duplicated '|-'"),
])
def test_pair_errors(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse_pair(text)


@pytest.mark.parametrize("text", ["p /\\", "(p", "p)", "P", "p ~> ~> q", ""])
def test_formula_errors_have_position(text):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert 0 <= e.value.position <= len(text)


def test_keywords_are_not_atoms():
    assert parse_formula("t") == Prop("t")
    with pytest.raises(ParseError):
        parse_formula("Tx")
    with pytest.raises(ValueError):
        Prop("T")


@given(formulas())
def test_round_trip(f):
    assert parse_formula(print_formula(f)) == f


@given(formulas())
def test_round_trip_against_oracle(f):
    assert ShuntingYard(print_formula(f)).parse() == f


@given(formulas(), formulas())
def test_pair_round_trip(f, g):
    cp = ConsequencePair(f, g)
    assert parse_pair(print_pair(cp)) == cp


def test_substitute():
    assert substitute(Cto(p, p), {"p": And(q, r)}) == Cto(And(q, r), And(q, r))
    assert substitute(Cto(p, q), {"p": q, "q": p}) == Cto(q, p)
    assert substitute(TOP, {"p": q}) == TOP


@given(formulas(("p", "q")))
def test_substitute_idempotent_when_range_is_fresh(f):
    m = {"p": And(r, TOP), "q": Cto(r, r)}
    once = substitute(f, m)
    assert substitute(once, m) == once


def test_subformulas():
    assert subformulas(Cto(p, q)) == {p, q, Cto(p, q)}
    assert subformulas(TOP) == {TOP}
    assert subformulas(And(p, p)) == {p, And(p, p)}


def test_helpers():
    f = parse_formula("(p ~> q) /\\ r /\\ T")
    assert list(conjuncts(f)) == [Cto(p, q), r, TOP]
    assert big_and([]) == TOP
    assert big_and([p, q, r]) == And(And(p, q), r)
    assert atoms(f, q) == ["p", "q", "r"]
    assert depth(f) == 3


def test_theory_gamma_dedups():
    a, b = parse_pair("p |- q"), parse_pair("q |- p")
    g = TheoryGamma([a, b, a])
    assert g.pairs == (a, b)
    with pytest.raises(TypeError):
        TheoryGamma(["p |- q"])
