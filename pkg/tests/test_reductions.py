from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from probcheck.automata import PFA, acceptance_probability
from probcheck.errors import AlphabetError, BoundError, EmptyWordError, ModelError
from probcheck.logic import serialize
from probcheck.reductions import (
    ACCEPT,
    VerificationReport,
    build_reduction_instance,
    canonical_assignment,
    lemma_3_1_routes,
    verify_lemma_3_1,
    verify_lemma_3_2,
    word_to_formula,
    word_to_scheduler,
)

from strategies import pfa_and_word


def test_scheduler_and_tau_on_coin(coin):
    sch, tau = word_to_scheduler(coin, ("a", "b"))
    assert sch.depth_actions == ("a", "b")
    assert sch.default == {"q1": "a", "q2": "a"}
    assert tau.vectors == ((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)))
    sch, _ = word_to_scheduler(coin, ("a",), default_action="b")
    assert sch.default == {"q1": "b", "q2": "b"}
    with pytest.raises(AlphabetError):
        word_to_scheduler(coin, ("a",), default_action="c")


def test_canonical_assignment(coin):
    nu = canonical_assignment(coin)
    assert nu == {"a": {"q1", "q2"}, "b": {"q1", "q2"}, ACCEPT: {"q2"}}
    pfa = PFA(("q1", "q2"), ("a",), {"a": ((0, 1), (0, 1))}, (1, 0), frozenset())
    assert canonical_assignment(pfa)["a"] == {"q2"}
    reserved = PFA(("q1",), (ACCEPT,), {ACCEPT: ((1,),)}, (1,), frozenset())
    with pytest.raises(ModelError):
        canonical_assignment(reserved)


def test_word_formula_text():
    assert serialize(word_to_formula(("a",))) == "true U P>0 [ X (a & Accept) ]"
    assert serialize(word_to_formula(("a", "b"))) == "true U P>0 [ X (a & P>0 [ X (b & Accept) ]) ]"
    with pytest.raises(EmptyWordError):
        word_to_formula(())


def test_lemma_3_1_report_line(coin):
    r = verify_lemma_3_1(coin, ("a", "a"))
    assert r.equal and r.lhs == F(3, 4)
    assert r.to_line() == "lemma=31 lhs=3/4 rhs=3/4 equal=true default_action=a depth_bound=2"


def test_lemma_3_2_on_coin(coin):
    r = verify_lemma_3_2(coin, ("a",), 3)
    assert (r.lhs, r.rhs) == (F(1, 2), F(1))
    assert not r.equal
    # the positive-probability operators are qualitative: (q1, 0) already satisfies the target
    assert dict(r.lower_bounds) == {1: F(1), 2: F(1), 3: F(1)}
    assert r.lines()[0] == "lemma=32 lhs=1/2 rhs=1/1 equal=false default_action=a depth_bound=3"
    assert r.lines()[1] == "lemma=32 until_within=1 value=1/1"
    assert verify_lemma_3_2(coin, ("a",)).depth_bound == 3


def test_lemma_3_2_agrees_at_the_extremes():
    sure = PFA(("q1", "q2"), ("a",), {"a": ((0, 1), (0, 1))}, (1, 0), frozenset({"q2"}))
    r = verify_lemma_3_2(sure, ("a",))
    assert r.lhs == r.rhs == 1
    never = PFA(("q1", "q2"), ("a",), {"a": ((0, 1), (0, 1))}, (1, 0), frozenset())
    r = verify_lemma_3_2(never, ("a", "a"))
    assert r.lhs == r.rhs == 0


def test_lemma_3_2_strict_gap():
    # a one-shot automaton: the accepting state q2 is entered with 1/3 and the sink q3 is absorbing
    pfa = PFA(
        ("q1", "q2", "q3"),
        ("a", "b"),
        {"a": ((0, F(1, 3), F(2, 3)), (0, 0, 1), (0, 0, 1)), "b": ((0, 0, 1), (0, 0, 1), (0, 0, 1))},
        (1, 0, 0),
        frozenset({"q2"}),
    )
    r = verify_lemma_3_2(pfa, ("a",))
    assert (r.lhs, r.rhs) == (F(1, 3), F(1))


def test_lemma_3_2_bounds(coin):
    with pytest.raises(BoundError):
        verify_lemma_3_2(coin, ("a", "a"), 2)
    with pytest.raises(EmptyWordError):
        verify_lemma_3_2(coin, ())


def test_report_formatting_defaults():
    r = VerificationReport("block", F(0), F(0))
    assert r.to_line() == "lemma=block lhs=0/1 rhs=0/1 equal=true default_action=- depth_bound=-"


def test_reduction_instance(coin):
    inst = build_reduction_instance(coin, ("a", "a"), "1/2")
    assert serialize(inst.formula).startswith("P>1/2 [ true U ")
    assert inst.acceptance_probability == F(3, 4)
    assert inst.threshold == F(1, 2) and inst.accepting == {"q2"}
    assert inst.mdp.actions == coin.alphabet


@given(pfa_and_word())
@settings(max_examples=80)
def test_three_routes_agree(data):
    pfa, word = data
    routes = lemma_3_1_routes(pfa, word)
    assert routes[0] == routes[1] == routes[2] == acceptance_probability(pfa, word)
    assert verify_lemma_3_1(pfa, word).equal


@given(pfa_and_word(max_states=3, max_len=3))
@settings(max_examples=40, deadline=None)
def test_formula_probability_dominates_acceptance(data):
    # every accepting run of the word witnesses the formula, so rhs >= lhs
    pfa, word = data
    if not word:
        return
    r = verify_lemma_3_2(pfa, word)
    assert r.rhs >= r.lhs
    values = [v for _, v in r.lower_bounds]
    assert values == sorted(values) and values[-1] <= r.rhs
