"""Acceptance suite: one test per criterion, each under its time budget.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import glob
import os
import random
import subprocess
import sys
import time
from fractions import Fraction as F

import pytest

from probcheck.automata import CutPointSpec, bounded_emptiness_search
from probcheck.counter import block_matrix_check, verify_lemma_4_1
from probcheck.errors import EmptyWordError
from probcheck.formats import parse_labels, parse_model, serialize_labels, serialize_model, write_counterexample
from probcheck.generators import pfa_instances, random_chain, random_mdp, random_subset
from probcheck.logic import (
    TRUE,
    And,
    Atom,
    Next,
    ProbOp,
    Until,
    check_mdp,
    mdp_min_probabilities,
    parse_formula,
    prob_until,
    bounded_until,
    serialize,
    subformulas,
)
from probcheck.markov import accepting_paths_enumerated, accepting_paths_forward, pfa_to_mdp
from probcheck.reductions import ACCEPT, verify_lemma_3_1, verify_lemma_3_2, word_to_formula, word_to_scheduler

from conftest import fixture_path
from oracles import enumerate_until, iterate_until, min_until_exhaustive, word_probability_by_runs

SEED = 20240611
INSTANCES = pfa_instances(SEED, 200, max_states=5, max_symbols=3, max_den=8, max_len=6)


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"


def test_instance_set_matches_its_description():
    assert len(INSTANCES) == 200
    for pfa, word in INSTANCES:
        assert len(pfa.states) <= 5 and len(pfa.alphabet) <= 3 and len(word) <= 6
        entries = [x for m in pfa.matrices.values() for row in m for x in row] + list(pfa.initial)
        assert all(x.denominator <= 8 for x in entries)


def test_criterion_01_word_scheduler_mass():
    with Budget(10):
        reports = [verify_lemma_3_1(p, w) for p, w in INSTANCES]
    bad = [r.to_line() for r in reports if not r.equal]
    assert not bad, bad
    assert all(isinstance(r.lhs, F) and isinstance(r.rhs, F) for r in reports)


def test_criterion_02_one_counter_simulation():
    with Budget(10):
        reports = [verify_lemma_4_1(p, w) for p, w in INSTANCES]
    bad = [r.to_line() for r in reports if not r.equal]
    assert not bad, bad


def test_criterion_03_block_matrix_identity():
    with Budget(5):
        reports = [block_matrix_check(p, w) for p, w in INSTANCES]
    bad = [r.to_line() for r in reports if not r.equal]
    assert not bad, bad


def test_criterion_04_forward_equals_enumeration():
    instances = pfa_instances(SEED + 4, 200, max_states=4, max_symbols=3, max_den=8, max_len=5)
    with Budget(10):
        for pfa, word in instances:
            mdp, acc = pfa_to_mdp(pfa)
            sch, _ = word_to_scheduler(pfa, word)
            fwd = accepting_paths_forward(mdp, sch, len(word), acc)
            enum = accepting_paths_enumerated(mdp, sch, len(word), acc)
            assert fwd == enum, (pfa, word)
            assert enum == word_probability_by_runs(pfa, word)


def _criterion5_chains():
    rng = random.Random(SEED + 5)
    out = []
    for _ in range(100):
        mc = random_chain(rng, 5)
        a = random_subset(rng, mc.states, 0.7)
        b = random_subset(rng, mc.states, 0.3)
        out.append((mc, a, b))
    return out


def test_criterion_05_until_against_truncated_paths():
    tol = F(1, 10**6)
    slow = []
    with Budget(5):
        # (b) x = x/2 + 1/2 has the unique solution x = 1
        geo = parse_model(open(fixture_path("geometric.mc")).read())
        assert prob_until(geo, geo.states, geo.labels["g"])["s0"] == 1
        # (a) truncated path mass is a monotone lower bound that closes the gap by depth 60
        for i, (mc, a, b) in enumerate(_criterion5_chains()):
            assert all(p >= F(1, 4) for s in mc.states for _, p in mc.successors(s))
            exact = prob_until(mc, a, b)
            assert enumerate_until(mc, a, b, 6) == iterate_until(mc, a, b, 6)
            prev = {s: F(0) for s in mc.states}
            x = {s: F(int(s in b)) for s in mc.states}
            for k in range(61):
                if k:
                    x = {
                        s: F(1) if s in b else (sum(p * x[t] for t, p in mc.successors(s)) if s in a else F(0))
                        for s in mc.states
                    }
                assert all(prev[s] <= x[s] <= exact[s] for s in mc.states), (i, k)
                prev = x
            assert x == bounded_until(mc, a, b, 60)
            gap = max(exact[s] - x[s] for s in mc.states)
            if gap > tol:
                slow.append((i, float(gap)))
    assert not slow, f"{len(slow)} of 100 chains still more than 1e-6 short at depth 60: {slow}"


def _criterion6_cases():
    rng = random.Random(SEED + 6)
    cases = []
    for _ in range(100):
        mdp = random_mdp(rng, max_states=4, max_actions=3)
        a = random_subset(rng, mdp.states, 0.7)
        b = random_subset(rng, mdp.states, 0.4)
        cases.append((mdp, a, b, F(rng.randint(0, 4), 4)))
    return cases


def test_criterion_06_policy_iteration_vs_all_memoryless_policies():
    with Budget(30):
        for mdp, a, b, r in _criterion6_cases():
            nu = {"a": a, "b": b}
            path = Until(Atom("a"), Atom("b"))
            oracle = min_until_exhaustive(mdp, a, b)
            assert mdp_min_probabilities(mdp, nu, path) == oracle
            for cmp in (">", ">="):
                phi = ProbOp(cmp, r, path)
                sat, verdict = check_mdp(mdp, nu, phi)
                assert sat == frozenset(s for s in mdp.states if phi.holds(oracle[s]))
                total = sum(w * oracle[s] for s, w in zip(mdp.states, mdp.initial))
                assert verdict == phi.holds(total)


def test_criterion_07_word_formula_structure():
    with Budget(1):
        for n in range(1, 7):
            word = tuple("abcab"[i % 5] for i in range(n))
            f = word_to_formula(word)
            assert isinstance(f, Until) and f.left == TRUE
            nodes = list(subformulas(f))
            assert sum(isinstance(x, ProbOp) for x in nodes) == n
            assert sum(isinstance(x, Next) for x in nodes) == n
            assert sum(isinstance(x, Until) for x in nodes) == 1
            atoms = [x.name for x in nodes if isinstance(x, Atom)]
            assert atoms == list(word) + [ACCEPT]
            # the chain: P>0 [ X (a_i & P>0 [ X ... ]) ] ending in (a_n & Accept)
            cur = f.right
            for i, sym in enumerate(word):
                assert isinstance(cur, ProbOp) and cur.cmp == ">" and cur.bound == 0
                assert isinstance(cur.path, Next)
                body = cur.path.operand
                assert isinstance(body, And) and body.left == Atom(sym)
                cur = body.right
            assert cur == Atom(ACCEPT)


def _explore_32(out_dir):
    lines, written = [], []
    for pfa, word in INSTANCES:
        if not word:
            with pytest.raises(EmptyWordError):
                verify_lemma_3_2(pfa, word, 2)
            lines.append("empty-word")
            continue
        r = verify_lemma_3_2(pfa, word, len(word) + 2)
        assert isinstance(r.lhs, F) and isinstance(r.rhs, F)
        lines.extend(r.lines())
        if not r.equal:
            written.append(write_counterexample(out_dir, pfa, word, r))
    return lines, written


def test_criterion_08_formula_exploration_is_reproducible(tmp_path):
    with Budget(60):
        first, files1 = _explore_32(tmp_path / "run1")
        second, files2 = _explore_32(tmp_path / "run2")
    assert first == second
    names1 = sorted(os.path.basename(f) for f in files1)
    assert names1 == sorted(os.path.basename(f) for f in files2)
    for f1, f2 in zip(sorted(files1), sorted(files2)):
        assert open(f1, "rb").read() == open(f2, "rb").read()
    unequal = sum(1 for l in first if "equal=false" in l)
    assert unequal == len(files1)
    assert len(set(files1)) == len(glob.glob(str(tmp_path / "run1" / "*")))
    print(f"formula exploration: {unequal} unequal of {sum(1 for p, w in INSTANCES if w)} nonempty words")


def test_criterion_09_bounded_emptiness_on_coin(coin):
    with Budget(1):
        assert bounded_emptiness_search(coin, CutPointSpec(F(1, 2), True), 2) == ("a", "a")
        assert bounded_emptiness_search(coin, CutPointSpec(F(1), True), 8) is None


def test_criterion_10_round_trip_and_simulation(tmp_path):
    with Budget(5):
        for path in sorted(glob.glob(fixture_path("*"))):
            text = open(path, encoding="utf-8").read()
            if path.endswith(".txt"):
                for line in text.splitlines():
                    assert serialize(parse_formula(line)) == line
            elif path.endswith(".labels"):
                states = parse_model(open(path[: -len(".labels")] + ".mdp").read()).states
                assert serialize_labels(parse_labels(text), states) == text, path
            else:
                once = serialize_model(parse_model(text))
                assert once == text, path
                assert serialize_model(parse_model(once)) == once
        outs = []
        for _ in range(2):
            proc = subprocess.run(
                [sys.executable, "-m", "probcheck", "simulate", fixture_path("split.poca"),
                 "--steps", "20", "--samples", "500", "--seed", "7"],
                capture_output=True, check=True,
            )
            outs.append(proc.stdout)
        assert outs[0] == outs[1] and outs[0]
