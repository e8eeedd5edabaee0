"""Probabilistic finite automata and their cut-point languages."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping, Optional, Sequence, Tuple

from . import numerics as nx
from .errors import AlphabetError, ModelError

Word = Tuple[str, ...]


@dataclass(frozen=True)
class PFA:
    """A probabilistic automaton ``(Q, {M_a}, pi, F)``.

    ``states`` and ``alphabet`` keep their declaration order: matrix rows and
    columns follow ``states``, and the emptiness search enumerates words in
    ``alphabet`` order.
    """

    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    matrices: Mapping[str, nx.Matrix]
    initial: nx.RowVector
    accepting: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "initial", nx.vector(self.initial))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(
            self, "matrices", {a: nx.matrix(m) for a, m in dict(self.matrices).items()}
        )
        n = len(self.states)
        if n == 0:
            raise ModelError("a PFA needs at least one state")
        if len(set(self.states)) != n:
            raise ModelError("duplicate state names")
        if not self.alphabet:
            raise ModelError("the alphabet must be nonempty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ModelError("duplicate alphabet symbols")
        if set(self.matrices) != set(self.alphabet):
            raise ModelError("matrices must be given for exactly the alphabet symbols")
        for a in self.alphabet:
            m = self.matrices[a]
            if nx.shape(m) != (n, n):
                raise ModelError(f"matrix {a!r} has shape {nx.shape(m)}, expected {(n, n)}")
            if not nx.is_stochastic(m):
                raise ModelError(f"matrix {a!r} is not stochastic")
        if len(self.initial) != n or not nx.validate_distribution(self.initial):
            raise ModelError("initial vector is not a distribution over the states")
        unknown = self.accepting - set(self.states)
        if unknown:
            raise ModelError(f"accepting states not declared: {sorted(unknown)}")

    def __hash__(self):
        return hash((self.states, self.alphabet, self.initial, self.accepting,
                     tuple(self.matrices[a] for a in self.alphabet)))

    def __eq__(self, other):
        if not isinstance(other, PFA):
            return NotImplemented
        return (self.states, self.alphabet, self.initial, self.accepting) == (
            other.states, other.alphabet, other.initial, other.accepting
        ) and all(self.matrices[a] == other.matrices[a] for a in self.alphabet)

    @property
    def accepting_vector(self) -> nx.RowVector:
        """The 0/1 indicator column of the accepting set."""
        return tuple(nx.ONE if q in self.accepting else nx.ZERO for q in self.states)

    def index(self, state: str) -> int:
        return self.states.index(state)

    def check_word(self, word: Sequence[str]) -> Word:
        word = tuple(word)
        for a in word:
            if a not in self.matrices:
                raise AlphabetError(f"symbol {a!r} is not in the alphabet {list(self.alphabet)}")
        return word


@dataclass(frozen=True)
class CutPointSpec:
    cutpoint: Fraction
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "cutpoint", nx.to_prob(self.cutpoint))

    def admits(self, p: Fraction) -> bool:
        return p > self.cutpoint if self.strict else p >= self.cutpoint


def parse_word(text: str, alphabet: Sequence[str]) -> Word:
    """Split command-line text into alphabet symbols.

    Whitespace separates symbols. A token that is not itself a symbol is
    read character by character, so ``"aab"`` works for single-letter
    alphabets while multi-letter symbols must be space separated.
    """
    symbols = set(alphabet)
    word = []
    for token in text.split():
        if token in symbols:
            word.append(token)
        elif all(ch in symbols for ch in token):
            word.extend(token)
        else:
            bad = token if len(token) == 1 else next((c for c in token if c not in symbols), token)
            raise AlphabetError(f"symbol {bad!r} is not in the alphabet {list(alphabet)}")
    return tuple(word)


def format_word(word: Sequence[str]) -> str:
    if all(len(a) == 1 for a in word):
        return "".join(word)
    return " ".join(word)


def forward_vector(pfa: PFA, word: Sequence[str]) -> nx.RowVector:
    """Distribution over states after reading ``word``: ``pi M_w``."""
    v = pfa.initial
    for a in pfa.check_word(word):
        v = nx.vec_mat(v, pfa.matrices[a])
    return v


def acceptance_probability(pfa: PFA, word: Sequence[str]) -> Fraction:
    return nx.dot(forward_vector(pfa, word), pfa.accepting_vector)


def acceptance_by_path_enumeration(pfa: PFA, word: Sequence[str]) -> Fraction:
    """Sum the weight of every state sequence ``q_0 ... q_n`` ending in ``F``.

    Exponential in ``len(word)``; meant as an independent check of
    :func:`acceptance_probability` on small instances.
    """
    word = pfa.check_word(word)
    n = len(pfa.states)
    total = nx.ZERO
    for seq in product(range(n), repeat=len(word) + 1):
        if pfa.states[seq[-1]] not in pfa.accepting:
            continue
        w = pfa.initial[seq[0]]
        for k, a in enumerate(word):
            if not w:
                break
            w *= pfa.matrices[a][seq[k]][seq[k + 1]]
        total += w
    return total


def language_membership(pfa: PFA, word: Sequence[str], spec: CutPointSpec) -> bool:
    return spec.admits(acceptance_probability(pfa, word))


def words_up_to(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length at most ``max_len`` in length-lexicographic order."""
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)


def bounded_emptiness_search(pfa: PFA, spec: CutPointSpec, max_len: int) -> Optional[Word]:
    """First word (length-lexicographic) of length <= ``max_len`` in the language.

    ``None`` only means no witness exists up to ``max_len``; emptiness of the
    full cut-point language is undecidable. Cost is ``|alphabet| ** max_len``.
    """
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    eta = pfa.accepting_vector
    # breadth-first over prefixes keeps the order length-lexicographic and
    # reuses each prefix's forward vector
    layer = [((), pfa.initial)]
    for n in range(max_len + 1):
        for word, v in layer:
            if spec.admits(nx.dot(v, eta)):
                return word
        if n == max_len:
            break
        layer = [
            (word + (a,), nx.vec_mat(v, pfa.matrices[a]))
            for word, v in layer
            for a in pfa.alphabet
        ]
    return None
