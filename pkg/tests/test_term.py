import pytest
from hypothesis import given, settings

from aterm import (
    Add, FloorDiv, Literal, Mod, Mul, Pow, Sub, TermSyntaxError, Variable, free_variables, parse, render, walk,
)
from termgen import terms

x, a, b = Variable("x"), Variable("a"), Variable("b")


@pytest.mark.parametrize("text, tree", [
    ("x^(a+a*b)", Pow(x, Add(a, Mul(a, b)))),
    ("2^3^2", Pow(Literal(2), Pow(Literal(3), Literal(2)))),
    ("a % b", Mod(a, b)),
    ("a - b - x", Sub(Sub(a, b), x)),
    ("a / b * x", Mul(FloorDiv(a, b), x)),
    ("(a+b)*x", Mul(Add(a, b), x)),
    ("  007 ", Literal(7)),
    ("0-a", Sub(Literal(0), a)),
])
def test_parse(text, tree):
    assert parse(text) == tree


@pytest.mark.parametrize("tree, text", [
    (Pow(x, Add(a, Mul(a, b))), "x^(a+a*b)"),
    (Literal(0), "0"),
    (Sub(Literal(0), a), "0-a"),
    (Pow(Pow(a, b), x), "(a^b)^x"),
    (Pow(a, Pow(b, x)), "a^b^x"),
    (Sub(a, Sub(b, x)), "a-(b-x)"),
    (Mod(a, Mul(b, x)), "a%(b*x)"),
    (Mul(Mod(a, b), x), "a%b*x"),
])
def test_render(tree, text):
    assert render(tree) == text


@pytest.mark.parametrize("text, pos", [
    ("", 0), ("1 +", 3), ("-3", 0), ("2*-x", 2), ("(a+b", 4), ("a b", 2), ("3 & 4", 2), ("a)", 1),
])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(TermSyntaxError) as info:
        parse(text)
    assert info.value.position == pos
    assert info.value.caret().splitlines()[-1] == " " * pos + "^"


def test_unary_minus_message():
    with pytest.raises(TermSyntaxError, match="0-x"):
        parse("-x")


def test_operator_overloads_build_terms():
    assert x ** (a + a * b) == parse("x^(a+a*b)")
    assert (x // 3) % b - 1 == parse("x/3%b-1")
    assert 2 ** x == Pow(Literal(2), x)


def test_literal_validation():
    with pytest.raises(ValueError):
        Literal(-1)
    with pytest.raises((TypeError, ValueError)):
        Literal(True)
    with pytest.raises(ValueError):
        Variable("2x")


def test_walk_paths_and_free_variables():
    t = parse("x^(a+1)")
    assert [p for p, _ in walk(t)] == [(), (0,), (1,), (1, 0), (1, 1)]
    assert free_variables(t) == {"x", "a"}


@settings(max_examples=300, deadline=None)
@given(terms())
def test_round_trip(t):
    assert parse(render(t)) == t
