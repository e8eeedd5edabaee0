"""Probabilistic one-counter automata.

The stack alphabet is a counting symbol ``Z`` over a bottom marker ``Z0``, so
a configuration is a state, a count of ``Z`` and whether ``Z0`` is still on
the stack. A rule pops the top symbol and pushes a word over ``{Z, Z0}``
(leftmost symbol on top); ``Z0`` may only be pushed back in bottom position
by a rule that consumed it.

Reading a word: close the start configuration under epsilon rules, then for
each symbol take one input step and close again. Configurations with no
applicable rule, or with an empty stack, send their mass to a reject sink.
Acceptance is by final state after the whole word.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import numerics as nx
from .automata import PFA, acceptance_probability
from .errors import AlphabetError, EpsilonCycleError, ModelError
from .markov import MarkovChain
from .reductions import VerificationReport

EPS = None
REJECT = "!reject"
MAX_EPSILON_STEPS = 256


@dataclass(frozen=True)
class CounterRule:
    source: str
    symbol: Optional[str]
    top: str
    target: str
    push: Tuple[str, ...]
    prob: Fraction

    def __post_init__(self):
        object.__setattr__(self, "push", tuple(self.push))
        object.__setattr__(self, "prob", nx.to_rational(self.prob))


@dataclass(frozen=True)
class Configuration:
    state: str
    counter: int
    has_bottom: bool


@dataclass(frozen=True, eq=False)
class POCA:
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    rules: Tuple[CounterRule, ...]
    start_state: str
    accepting: frozenset = field(default_factory=frozenset)
    stack_symbols: Tuple[str, ...] = ("Z", "Z0")
    start_symbol: str = "Z0"
    counter_symbol: str = "Z"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "stack_symbols", tuple(self.stack_symbols))
        index: Dict[tuple, List[CounterRule]] = {}
        for r in self.rules:
            index.setdefault((r.source, r.symbol, r.top), []).append(r)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    def rules_for(self, state: str, symbol: Optional[str], top: str) -> Tuple[CounterRule, ...]:
        return self._index.get((state, symbol, top), ())

    @property
    def start(self) -> Configuration:
        return Configuration(self.start_state, 0, True)

    def top(self, c: Configuration) -> Optional[str]:
        if c.counter > 0:
            return self.counter_symbol
        return self.start_symbol if c.has_bottom else None

    def apply(self, c: Configuration, rule: CounterRule) -> Configuration:
        if self.top(c) == self.counter_symbol:
            counter, bottom = c.counter - 1, c.has_bottom
        else:
            counter, bottom = c.counter, False
        counter += sum(1 for g in rule.push if g == self.counter_symbol)
        if self.start_symbol in rule.push:
            bottom = True
        return Configuration(rule.target, counter, bottom)

    def structurally_equal(self, other: "POCA") -> bool:
        return (
            self.states == other.states
            and self.alphabet == other.alphabet
            and self.rules == other.rules
            and self.start_state == other.start_state
            and self.accepting == other.accepting
            and self.stack_symbols == other.stack_symbols
            and self.start_symbol == other.start_symbol
            and self.counter_symbol == other.counter_symbol
        )


def _fmt_symbol(x):
    return "eps" if x is EPS else x


def validate_poca(p: POCA) -> List[str]:
    """Every violated POCA invariant, as human-readable strings."""
    problems = []
    gamma = set(p.stack_symbols)
    if len(p.stack_symbols) != 2 or len(gamma) != 2:
        problems.append(f"stack alphabet must have exactly two symbols, got {list(p.stack_symbols)}")
    if p.counter_symbol not in gamma or p.start_symbol not in gamma or p.counter_symbol == p.start_symbol:
        problems.append("stack alphabet must contain distinct counter and bottom symbols")
    states = set(p.states)
    if not p.states:
        problems.append("no states")
    if not p.alphabet:
        problems.append("empty input alphabet")
    if p.start_state not in states:
        problems.append(f"start state {p.start_state!r} is not a state")
    if not p.accepting <= states:
        problems.append(f"accepting states not declared: {sorted(p.accepting - states)}")
    groups: Dict[tuple, Fraction] = {}
    for r in p.rules:
        where = f"rule {r.source}, {_fmt_symbol(r.symbol)}, {r.top} -> {r.target}"
        if r.source not in states or r.target not in states:
            problems.append(f"{where}: unknown state")
        if r.symbol is not EPS and r.symbol not in p.alphabet:
            problems.append(f"{where}: unknown input symbol")
        if r.top not in gamma:
            problems.append(f"{where}: unknown stack symbol {r.top!r}")
        if any(g not in gamma for g in r.push):
            problems.append(f"{where}: push word uses unknown stack symbols")
        if not nx.ZERO < r.prob <= nx.ONE:
            problems.append(f"{where}: probability {r.prob} outside (0, 1]")
        bottoms = [i for i, g in enumerate(r.push) if g == p.start_symbol]
        if r.top == p.start_symbol:
            if bottoms and bottoms != [len(r.push) - 1]:
                problems.append(f"{where}: bottom symbol may only be pushed once, in bottom position")
        elif bottoms:
            problems.append(f"{where}: bottom symbol pushed above the counter")
        key = (r.source, r.symbol, r.top)
        groups[key] = groups.get(key, nx.ZERO) + r.prob
    for (q, x, g), total in groups.items():
        if total != 1:
            problems.append(f"group ({q}, {_fmt_symbol(x)}, {g}) sums to {total}, expected 1")
    controls = {(q, g) for q, x, g in groups if x is EPS}
    for q, x, g in groups:
        if x is not EPS and (q, g) in controls:
            problems.append(f"({q}, {g}) has both epsilon and input rules")
            controls.discard((q, g))
    return problems


def _require_valid(p: POCA):
    problems = validate_poca(p)
    if problems:
        raise ModelError("invalid one-counter automaton: " + "; ".join(problems))


class _Closer:
    """Memoized epsilon closure: configuration -> (terminal distribution, rejected mass)."""

    def __init__(self, p: POCA, max_steps: int = MAX_EPSILON_STEPS):
        self.p = p
        self.max_steps = max_steps
        self.memo: Dict[Configuration, Tuple[Dict[Configuration, Fraction], Fraction]] = {}
        self.active = set()

    def __call__(self, c: Configuration, depth: int = 0):
        hit = self.memo.get(c)
        if hit is not None:
            return hit
        top = self.p.top(c)
        if top is None:
            result = ({}, nx.ONE)
        else:
            rules = self.p.rules_for(c.state, EPS, top)
            if not rules:
                result = ({c: nx.ONE}, nx.ZERO)
            else:
                if c in self.active:
                    raise EpsilonCycleError(f"epsilon rules cycle through {c}")
                if depth >= self.max_steps:
                    raise EpsilonCycleError(
                        f"epsilon steps from {c} do not terminate within {self.max_steps} steps"
                    )
                self.active.add(c)
                dist: Dict[Configuration, Fraction] = {}
                reject = nx.ZERO
                for r in rules:
                    sub, rej = self(self.p.apply(c, r), depth + 1)
                    for d, w in sub.items():
                        dist[d] = dist.get(d, nx.ZERO) + r.prob * w
                    reject += r.prob * rej
                self.active.discard(c)
                result = (dist, reject)
        self.memo[c] = result
        return result

    def close(self, dist: Mapping[Configuration, Fraction], reject: Fraction):
        out: Dict[Configuration, Fraction] = {}
        for c, w in dist.items():
            sub, rej = self(c)
            for d, v in sub.items():
                out[d] = out.get(d, nx.ZERO) + w * v
            reject += w * rej
        return out, reject


def poca_run(p: POCA, word: Sequence[str]) -> List[Tuple[Dict[Configuration, Fraction], Fraction]]:
    """Configuration distribution and rejected mass after each stage.

    Stage 0 is the closed start configuration; stage ``i`` follows the
    ``i``-th symbol and its closure.
    """
    _require_valid(p)
    word = tuple(word)
    for a in word:
        if a not in p.alphabet:
            raise AlphabetError(f"symbol {a!r} is not in the alphabet {list(p.alphabet)}")
    closer = _Closer(p)
    dist, reject = closer.close({p.start: nx.ONE}, nx.ZERO)
    stages = [(dist, reject)]
    for a in word:
        moved: Dict[Configuration, Fraction] = {}
        for c, w in dist.items():
            rules = p.rules_for(c.state, a, p.top(c))
            if not rules:
                reject += w
                continue
            for r in rules:
                d = p.apply(c, r)
                moved[d] = moved.get(d, nx.ZERO) + w * r.prob
        dist, reject = closer.close(moved, reject)
        stages.append((dist, reject))
    return stages


def poca_acceptance_probability(p: POCA, word: Sequence[str]) -> Fraction:
    dist, _ = poca_run(p, word)[-1]
    return sum((w for c, w in dist.items() if c.state in p.accepting), nx.ZERO)


def _fresh_state(taken, base="q0"):
    name, i = base, 1
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    return name


def pfa_to_poca(pfa: PFA) -> POCA:
    """One-counter automaton with the same word function as ``pfa``.

    A fresh start state replaces the bottom marker by a single ``Z`` while
    moving to a PFA state with probability ``pi(s)``; afterwards each symbol
    moves ``Z`` to ``Z`` following ``M_a``.
    """
    q0 = _fresh_state(set(pfa.states))
    rules = [
        CounterRule(q0, EPS, "Z0", s, ("Z",), w)
        for s, w in zip(pfa.states, pfa.initial)
        if w > 0
    ]
    for a in pfa.alphabet:
        for i, src in enumerate(pfa.states):
            for j, dst in enumerate(pfa.states):
                w = pfa.matrices[a][i][j]
                if w > 0:
                    rules.append(CounterRule(src, a, "Z", dst, ("Z",), w))
    return POCA((q0,) + pfa.states, pfa.alphabet, tuple(rules), q0, pfa.accepting)


def block_matrices(pfa: PFA) -> Tuple[nx.Matrix, Dict[str, nx.Matrix], nx.RowVector]:
    """``M'_eps``, ``{M'_a}`` and ``eta'_F`` over ``(q0, Q...)``.

    ``M'_eps = [[0, pi], [0, I]]``, ``M'_a = [[0, pi], [0, M_a]]`` and
    ``eta'_F = (0, eta_F)``.
    """
    n = len(pfa.states)
    eye = nx.identity(n)

    def block(lower):
        return ((nx.ZERO,) + pfa.initial,) + tuple((nx.ZERO,) + row for row in lower)

    return (
        block(eye),
        {a: block(pfa.matrices[a]) for a in pfa.alphabet},
        (nx.ZERO,) + pfa.accepting_vector,
    )


def block_matrix_check(pfa: PFA, word: Sequence[str]) -> VerificationReport:
    word = pfa.check_word(word)
    m_eps, m_sym, eta = block_matrices(pfa)
    product = m_eps
    for a in word:
        product = nx.mat_mul(product, m_sym[a])
    start = (nx.ONE,) + (nx.ZERO,) * len(pfa.states)
    lhs = nx.dot(nx.vec_mat(start, product), eta)

    m_w = nx.identity(len(pfa.states))
    for a in word:
        m_w = nx.mat_mul(m_w, pfa.matrices[a])
    rhs = nx.dot(nx.vec_mat(pfa.initial, m_w), pfa.accepting_vector)
    return VerificationReport("block", lhs, rhs)


def verify_lemma_4_1(pfa: PFA, word: Sequence[str]) -> VerificationReport:
    word = pfa.check_word(word)
    lhs = acceptance_probability(pfa, word)
    rhs = poca_acceptance_probability(pfa_to_poca(pfa), word)
    return VerificationReport("41", lhs, rhs)


def _single_symbol(p: POCA) -> str:
    if len(p.alphabet) != 1:
        raise AlphabetError(f"a one-counter process has a one-letter alphabet, got {list(p.alphabet)}")
    return p.alphabet[0]


def _step_rules(p: POCA, c: Configuration, symbol: str) -> Tuple[CounterRule, ...]:
    top = p.top(c)
    if top is None:
        return ()
    return p.rules_for(c.state, EPS, top) or p.rules_for(c.state, symbol, top)


def unfold_ocp(p: POCA, depth: int, nu: Optional[Mapping[str, Sequence[str]]] = None) -> MarkovChain:
    """Truncated configuration chain of a one-counter process.

    One chain step applies one rule (epsilon rules first, which validation
    makes unambiguous). Configurations first reached after ``depth`` steps
    become absorbing, so the first ``depth`` step distributions are exact.
    Stuck configurations move to the absorbing ``REJECT`` state. Labels lift
    ``nu`` (default: each state name labels its own configurations).
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    _require_valid(p)
    symbol = _single_symbol(p)
    closer = _Closer(p)
    closer(p.start)
    order = [p.start]
    level = {p.start: 0}
    trans = {}
    i = 0
    while i < len(order):
        c = order[i]
        i += 1
        if c == REJECT or level[c] >= depth:
            trans[c] = ((c, nx.ONE),)
            continue
        rules = _step_rules(p, c, symbol)
        if not rules:
            succ = ((REJECT, nx.ONE),)
        else:
            merged: Dict[object, Fraction] = {}
            for r in rules:
                d = p.apply(c, r)
                merged[d] = merged.get(d, nx.ZERO) + r.prob
            succ = tuple(merged.items())
        trans[c] = succ
        for d, _ in succ:
            if d not in level:
                level[d] = level[c] + 1
                order.append(d)
                if d != REJECT:
                    closer(d)
    if nu is None:
        nu = {q: (q,) for q in p.states}
    labels = {
        ap: frozenset(c for c in order if c != REJECT and c.state in set(qs))
        for ap, qs in nu.items()
    }
    return MarkovChain(tuple(order), trans, labels, {p.start: nx.ONE})


def _draw(rng: random.Random, rules: Sequence[CounterRule]) -> CounterRule:
    scale = lcm(*(r.prob.denominator for r in rules))
    pick = rng.randrange(scale)
    acc = 0
    for r in rules:
        acc += r.prob.numerator * (scale // r.prob.denominator)
        if pick < acc:
            return r
    return rules[-1]


def simulate_ocp(p: POCA, steps: int, samples: int, seed: int) -> Counter:
    """Histogram of ``(state, counter)`` after ``steps`` single-rule steps.

    Rules are drawn exactly (integer draws against the common denominator)
    from one ``random.Random(seed)`` stream, so a seed fixes the result.
    Rejected runs are counted under ``(REJECT, 0)``.
    """
    _require_valid(p)
    symbol = _single_symbol(p)
    if steps < 0 or samples < 0:
        raise ValueError("steps and samples must be nonnegative")
    closer = _Closer(p)
    rng = random.Random(seed)
    hist: Counter = Counter()
    for _ in range(samples):
        c = p.start
        for _ in range(steps):
            if p.top(c) is not None and p.rules_for(c.state, EPS, p.top(c)):
                closer(c)
            rules = _step_rules(p, c, symbol)
            if not rules:
                c = None
                break
            c = p.apply(c, _draw(rng, rules))
        hist[(REJECT, 0) if c is None else (c.state, c.counter)] += 1
    return hist


def format_histogram(hist: Mapping[Tuple[str, int], int]) -> str:
    rows = sorted(hist.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    return "".join(f"{state}\t{counter}\t{count}\n" for (state, counter), count in rows)
