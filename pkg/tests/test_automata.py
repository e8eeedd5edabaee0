from fractions import Fraction as F

import pytest
from hypothesis import given

from probcheck.automata import (
    PFA,
    CutPointSpec,
    acceptance_by_path_enumeration,
    acceptance_probability,
    bounded_emptiness_search,
    format_word,
    forward_vector,
    language_membership,
    parse_word,
    words_up_to,
)
from probcheck.errors import AlphabetError, ModelError

from oracles import word_probability_by_runs
from strategies import pfa_and_word, pfas


@pytest.mark.parametrize(
    "word, expected",
    [((), F(0)), (("a",), F(1, 2)), (("a", "a"), F(3, 4)), (("b", "a"), F(1, 2)), (("a", "b", "a"), F(3, 4)),
     (("a",) * 5, F(31, 32))],
)
def test_coin_values(coin, word, expected):
    assert acceptance_probability(coin, word) == expected


def test_forward_vector(coin):
    assert forward_vector(coin, ("a", "a")) == (F(1, 4), F(3, 4))
    assert forward_vector(coin, ()) == coin.initial


def test_unknown_symbol(coin):
    with pytest.raises(AlphabetError):
        acceptance_probability(coin, ("c",))
    with pytest.raises(AlphabetError):
        parse_word("ax", coin.alphabet)


def test_parse_and_format_words():
    assert parse_word("a b a", ("a", "b")) == ("a", "b", "a")
    assert parse_word("aba", ("a", "b")) == ("a", "b", "a")
    assert parse_word("", ("a",)) == ()
    assert parse_word("ab", ("ab", "a")) == ("ab",)
    assert format_word(("a", "b")) == "ab"
    assert format_word(("ab", "a")) == "ab a"


def test_words_up_to_order():
    assert list(words_up_to(("a", "b"), 2)) == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(states=()),
        dict(states=("q1", "q1")),
        dict(alphabet=()),
        dict(matrices={"a": ((1, 0), (0, 1))}),
        dict(matrices={"a": ((1, 0), (0, 1)), "b": ((F(1, 2), F(1, 3)), (0, 1))}),
        dict(initial=(F(1, 2), F(1, 3))),
        dict(accepting=frozenset({"q9"})),
        dict(matrices={"a": ((1,),), "b": ((1,),)}),
    ],
)
def test_pfa_rejects_invalid(kwargs):
    base = dict(
        states=("q1", "q2"),
        alphabet=("a", "b"),
        matrices={"a": ((1, 0), (0, 1)), "b": ((0, 1), (1, 0))},
        initial=(1, 0),
        accepting=frozenset(),
    )
    base.update(kwargs)
    with pytest.raises(ModelError):
        PFA(**base)


def test_pfa_value_semantics(coin):
    same = PFA(coin.states, coin.alphabet, dict(coin.matrices), coin.initial, coin.accepting)
    assert same == coin and hash(same) == hash(coin)


def test_cut_point_membership(coin):
    assert language_membership(coin, ("a",), CutPointSpec(F(1, 2), strict=False))
    assert not language_membership(coin, ("a",), CutPointSpec(F(1, 2), strict=True))


def test_emptiness_search_on_coin(coin):
    assert bounded_emptiness_search(coin, CutPointSpec(F(1, 2)), 2) == ("a", "a")
    assert bounded_emptiness_search(coin, CutPointSpec(F(1, 2), False), 2) == ("a",)
    assert bounded_emptiness_search(coin, CutPointSpec(F(0), False), 2) == ()
    assert bounded_emptiness_search(coin, CutPointSpec(F(1)), 8) is None
    assert bounded_emptiness_search(coin, CutPointSpec(F(1, 2)), 1) is None
    with pytest.raises(ValueError):
        bounded_emptiness_search(coin, CutPointSpec(F(1, 2)), -1)


@given(pfa_and_word())
def test_matrix_product_equals_run_enumeration(data):
    pfa, word = data
    p = acceptance_probability(pfa, word)
    assert p == acceptance_by_path_enumeration(pfa, word) == word_probability_by_runs(pfa, word)
    assert 0 <= p <= 1 and isinstance(p, F)


@given(pfa_and_word())
def test_forward_vector_is_distribution(data):
    pfa, word = data
    v = forward_vector(pfa, word)
    assert sum(v) == 1 and all(x >= 0 for x in v)


@given(pfas(max_states=3, max_symbols=2))
def test_emptiness_witness_is_first_in_order(pfa):
    spec = CutPointSpec(F(1, 2))
    found = bounded_emptiness_search(pfa, spec, 3)
    members = [w for w in words_up_to(pfa.alphabet, 3) if language_membership(pfa, w, spec)]
    assert found == (members[0] if members else None)
