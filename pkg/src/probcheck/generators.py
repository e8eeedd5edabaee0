"""Seeded random models for property suites and ``verify --suite``.

All randomness flows through an explicit :class:`random.Random`, so a seed
determines every instance.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Tuple

from .automata import PFA, Word
from .markov import MDP, MarkovChain

SYMBOLS = "abcdefgh"


def random_distribution(rng: random.Random, n: int, max_den: int = 8) -> Tuple[Fraction, ...]:
    """Drop ``d <= max_den`` units of mass ``1/d`` into ``n`` bins."""
    d = rng.randint(1, max_den)
    bins = [0] * n
    for _ in range(d):
        bins[rng.randrange(n)] += 1
    return tuple(Fraction(b, d) for b in bins)


def random_pfa(rng: random.Random, max_states: int = 5, max_symbols: int = 3, max_den: int = 8) -> PFA:
    m = rng.randint(1, max_states)
    k = rng.randint(1, max_symbols)
    states = tuple(f"q{i + 1}" for i in range(m))
    alphabet = tuple(SYMBOLS[:k])
    matrices = {a: tuple(random_distribution(rng, m, max_den) for _ in range(m)) for a in alphabet}
    accepting = frozenset(q for q in states if rng.random() < 0.5)
    return PFA(states, alphabet, matrices, random_distribution(rng, m, max_den), accepting)


def random_word(rng: random.Random, alphabet, max_len: int, min_len: int = 0) -> Word:
    return tuple(rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len)))


def pfa_instances(seed: int, count: int, max_states: int = 5, max_symbols: int = 3,
                  max_den: int = 8, max_len: int = 6) -> List[Tuple[PFA, Word]]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        pfa = random_pfa(rng, max_states, max_symbols, max_den)
        out.append((pfa, random_word(rng, pfa.alphabet, max_len)))
    return out


def random_chain(rng: random.Random, n: int = 5, max_out: int = 4) -> MarkovChain:
    """Chain on ``s0..s{n-1}`` whose transition probabilities are all >= 1/4."""
    states = tuple(f"s{i}" for i in range(n))
    trans = {}
    for s in states:
        k = rng.randint(1, min(max_out, n))
        d = rng.randint(k, 4)
        # compose d units into k positive parts
        cuts = sorted(rng.sample(range(1, d), k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
        succ = rng.sample(states, k)
        trans[s] = tuple((t, Fraction(c, d)) for t, c in zip(succ, parts))
    return MarkovChain(states, trans)


def random_mdp(rng: random.Random, max_states: int = 4, max_actions: int = 3, max_den: int = 4) -> MDP:
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_actions)
    states = tuple(f"s{i}" for i in range(n))
    actions = tuple(f"act{j}" for j in range(k))
    trans = {}
    for s in states:
        enabled = [a for a in actions if rng.random() < 0.7] or [rng.choice(actions)]
        for a in enabled:
            trans[(s, a)] = random_distribution(rng, n, max_den)
    return MDP(states, actions, trans, random_distribution(rng, n, max_den))


def random_subset(rng: random.Random, items, p: float = 0.5) -> frozenset:
    return frozenset(x for x in items if rng.random() < p)
