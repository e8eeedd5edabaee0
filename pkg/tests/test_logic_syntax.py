from fractions import Fraction as F
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from probcheck.errors import ParseError
from probcheck.logic import (
    TRUE,
    And,
    Atom,
    Embed,
    Next,
    Not,
    PAnd,
    PNext,
    PNot,
    ProbOp,
    PUntil,
    Until,
    is_pctl,
    parse_formula,
    parse_path_formula,
    path_and,
    path_next,
    path_not,
    path_until,
    serialize,
    tokenize,
)

NAMES = st.sampled_from(["a", "b", "goal", "P", "Accept", "x1"])
BOUNDS = st.fractions(min_value=0, max_value=1, max_denominator=9)


@lru_cache(maxsize=None)
def state_formulas(depth):
    if depth <= 1:
        return st.one_of(st.just(TRUE), NAMES.map(Atom))
    sub = state_formulas(depth - 1)
    return st.one_of(
        st.just(TRUE),
        NAMES.map(Atom),
        sub.map(Not),
        st.tuples(sub, sub).map(lambda p: And(*p)),
        st.tuples(st.sampled_from([">", ">="]), BOUNDS, path_formulas(depth - 1)).map(lambda t: ProbOp(*t)),
    )


@lru_cache(maxsize=None)
def path_formulas(depth):
    sub_state = state_formulas(depth - 1) if depth > 1 else st.just(TRUE)
    if depth <= 1:
        return sub_state.map(Next)
    sub = st.one_of(sub_state, path_formulas(depth - 1))
    return st.one_of(
        sub.map(path_next),
        st.tuples(sub, sub).map(lambda p: path_until(*p)),
        st.tuples(sub, sub).map(lambda p: path_and(*p)).filter(lambda f: not isinstance(f, Embed)),
        sub.map(path_not).filter(lambda f: not isinstance(f, Embed)),
    )


@given(state_formulas(6))
@settings(max_examples=300)
def test_state_round_trip(phi):
    text = serialize(phi)
    assert parse_formula(text) == phi
    assert serialize(parse_formula(text)) == text


@given(path_formulas(6))
@settings(max_examples=300)
def test_path_round_trip(psi):
    text = serialize(psi)
    assert parse_path_formula(text) == psi


@pytest.mark.parametrize(
    "text, expected",
    [
        ("true", TRUE),
        ("!!a", Not(Not(Atom("a")))),
        ("(a & b)", And(Atom("a"), Atom("b"))),
        ("P>=1/2 [ X a ]", ProbOp(">=", F(1, 2), Next(Atom("a")))),
        ("P>0.25 [ a U b ]", ProbOp(">", F(1, 4), Until(Atom("a"), Atom("b")))),
        ("P > 1 [a U b]", ProbOp(">", F(1), Until(Atom("a"), Atom("b")))),
        ("P", Atom("P")),
        ("(P & P>0 [ X P ])", And(Atom("P"), ProbOp(">", 0, Next(Atom("P"))))),
    ],
)
def test_parse_examples(text, expected):
    assert parse_formula(text) == expected


def test_until_is_right_associative_and_unary_binds_tighter():
    f = parse_path_formula("a U b U c")
    assert f == PUntil(Embed(Atom("a")), Until(Atom("b"), Atom("c")))
    assert parse_path_formula("!X a U b") == PUntil(PNot(Next(Atom("a"))), Embed(Atom("b")))
    assert parse_path_formula("X X a") == PNext(Next(Atom("a")))
    assert parse_path_formula("(X a & b)") == PAnd(Next(Atom("a")), Embed(Atom("b")))


def test_canonical_constructors():
    assert path_not(Atom("a")) == Embed(Not(Atom("a")))
    assert path_until(Atom("a"), Atom("b")) == Until(Atom("a"), Atom("b"))
    assert path_next(Atom("a")) == Next(Atom("a"))
    with pytest.raises(ValueError):
        PNot(Embed(Atom("a")))
    with pytest.raises(ValueError):
        PUntil(Embed(Atom("a")), Embed(Atom("b")))
    with pytest.raises(ValueError):
        ProbOp("<", F(1, 2), Next(TRUE))
    with pytest.raises(TypeError):
        Not(Next(TRUE))


def test_is_pctl():
    assert is_pctl(parse_formula("P>0 [ true U P>=1 [ X a ] ]"))
    assert not is_pctl(parse_formula("P>0 [ X X a ]"))


@pytest.mark.parametrize(
    "text, column",
    [
        ("a U b", 3),
        ("(a & ", 6),
        ("P>2 [ X a ]", 3),
        ("X a", 1),
        ("a $ b", 3),
        ("P>1/2 X a", 7),
        ("P>=1/2 [ X a ] ]", 16),
        ("(a b)", 4),
        ("U", 1),
    ],
)
def test_parse_errors_carry_positions(text, column):
    with pytest.raises(ParseError) as err:
        parse_formula(text)
    assert err.value.column == column
    assert err.value.line == 1
    assert f"column {column}" in str(err.value)


def test_error_position_on_later_line():
    with pytest.raises(ParseError) as err:
        parse_formula("(a &\n  b U c)")
    assert (err.value.line, err.value.column) == (2, 5)


def test_tokenize_positions():
    toks = tokenize("P>=1/2\n[ X a ]")
    assert [(t.text, t.line, t.column) for t in toks][:4] == [("P", 1, 1), (">=", 1, 2), ("1", 1, 4), ("/", 1, 5)]
    assert (toks[-1].line, toks[-1].column) in {(2, 7), (2, 8)}
