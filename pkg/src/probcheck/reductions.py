"""The word-to-scheduler and word-to-formula constructions and their checks.

For a PFA ``A`` and word ``w = a_1 ... a_n`` this module builds

* the depth-based scheduler playing ``a_{i+1}`` after ``i`` steps on the
  MDP view of ``A``, together with the forward vectors ``tau_i``;
* the labeling ``nu``: symbol ``a`` holds in every state with positive
  incoming ``a``-mass, ``Accept`` holds on ``F``;
* the path formula ``true U P>0 [ X phi_1 ]`` with
  ``phi_i = a_i & P>0 [ X phi_{i+1} ]`` and ``phi_n = a_n & Accept``;

and compares, exactly, the acceptance probability of ``w`` with the
scheduler-path mass (always equal) and with the probability of the formula
in the scheduler-induced chain (reported, not assumed equal).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from . import numerics as nx
from .automata import PFA, Word, acceptance_probability
from .errors import BoundError, EmptyWordError, ModelError
from .logic.checking import bounded_until, check_mc, mc_path_probabilities
from .logic.syntax import TRUE, And, Atom, Next, PathFormula, ProbOp, StateFormula, Until
from .markov import (
    MDP,
    Scheduler,
    accepting_paths_enumerated,
    accepting_paths_forward,
    accepting_paths_probability,
    default_choice,
    induced_chain,
    lift_labels,
    pfa_to_mdp,
)

ACCEPT = "Accept"


@dataclass(frozen=True)
class TauTrace:
    """Forward distributions ``tau_1 ... tau_n`` (``tau_i = tau_{i-1} M_{a_i}``)."""

    vectors: Tuple[nx.RowVector, ...]

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]


@dataclass(frozen=True)
class VerificationReport:
    lemma: str
    lhs: Fraction
    rhs: Fraction
    default_action: Optional[str] = None
    depth_bound: Optional[int] = None
    lower_bounds: Tuple[Tuple[int, Fraction], ...] = ()
    context: Mapping[str, str] = field(default_factory=dict)

    def __hash__(self):
        return hash((self.lemma, self.lhs, self.rhs, self.default_action, self.depth_bound))

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_line(self) -> str:
        return (
            f"lemma={self.lemma} lhs={nx.format_fraction(self.lhs)} "
            f"rhs={nx.format_fraction(self.rhs)} equal={'true' if self.equal else 'false'} "
            f"default_action={self.default_action or '-'} "
            f"depth_bound={'-' if self.depth_bound is None else self.depth_bound}"
        )

    def lines(self) -> list:
        out = [self.to_line()]
        for k, v in self.lower_bounds:
            out.append(f"lemma={self.lemma} until_within={k} value={nx.format_fraction(v)}")
        return out


@dataclass(frozen=True, eq=False)
class ReductionInstance:
    mdp: MDP
    nu: Mapping[str, frozenset]
    formula: StateFormula
    scheduler: Scheduler
    word: Word
    threshold: Fraction
    accepting: frozenset
    acceptance_probability: Fraction


def word_to_scheduler(pfa: PFA, word: Sequence[str], default_action: Optional[str] = None) -> Tuple[Scheduler, TauTrace]:
    """Depth-based scheduler reading ``word`` and its forward-vector trace.

    Beyond ``len(word)`` every state plays ``default_action`` (the
    lexicographically smallest symbol when not given).
    """
    word = pfa.check_word(word)
    if default_action is not None:
        pfa.check_word((default_action,))
    mdp, _ = pfa_to_mdp(pfa)
    sch = Scheduler.depth_based(word, default_choice(mdp, default_action))
    tau = []
    v = pfa.initial
    for a in word:
        v = nx.vec_mat(v, pfa.matrices[a])
        tau.append(v)
    return sch, TauTrace(tuple(tau))


def _default_name(sch: Scheduler) -> str:
    names = set(sch.default.values())
    return names.pop() if len(names) == 1 else "mixed"


def canonical_assignment(pfa: PFA) -> Dict[str, frozenset]:
    if ACCEPT in pfa.alphabet:
        raise ModelError(f"the symbol name {ACCEPT!r} is reserved for the accepting label")
    nu = {}
    for a in pfa.alphabet:
        m = pfa.matrices[a]
        nu[a] = frozenset(
            q for j, q in enumerate(pfa.states) if any(row[j] > 0 for row in m)
        )
    nu[ACCEPT] = frozenset(pfa.accepting)
    return nu


def word_to_formula(word: Sequence[str]) -> PathFormula:
    word = tuple(word)
    if not word:
        raise EmptyWordError("the formula construction needs a nonempty word")
    phi: StateFormula = And(Atom(word[-1]), Atom(ACCEPT))
    for a in reversed(word[:-1]):
        phi = And(Atom(a), ProbOp(">", 0, Next(phi)))
    return Until(TRUE, ProbOp(">", 0, Next(phi)))


def verify_lemma_3_1(pfa: PFA, word: Sequence[str], default_action: Optional[str] = None) -> VerificationReport:
    """Acceptance probability against the mass of accepting scheduler paths."""
    word = pfa.check_word(word)
    lhs = acceptance_probability(pfa, word)
    mdp, accepting = pfa_to_mdp(pfa)
    sch, _ = word_to_scheduler(pfa, word, default_action)
    rhs = accepting_paths_probability(mdp, sch, len(word), accepting)
    return VerificationReport("31", lhs, rhs, _default_name(sch), len(word))


def lemma_3_1_routes(pfa: PFA, word: Sequence[str]) -> Tuple[Fraction, Fraction, Fraction]:
    """Three routes to the same value: tau-vector mass on F, forward MDP
    propagation, and explicit path enumeration."""
    word = pfa.check_word(word)
    mdp, accepting = pfa_to_mdp(pfa)
    sch, tau = word_to_scheduler(pfa, word)
    last = tau[-1] if len(tau) else pfa.initial
    from_tau = sum((w for q, w in zip(pfa.states, last) if q in accepting), nx.ZERO)
    return (
        from_tau,
        accepting_paths_forward(mdp, sch, len(word), accepting),
        accepting_paths_enumerated(mdp, sch, len(word), accepting),
    )


def verify_lemma_3_2(
    pfa: PFA,
    word: Sequence[str],
    depth_bound: Optional[int] = None,
    default_action: Optional[str] = None,
) -> VerificationReport:
    """Scheduler-path mass against the probability of the word formula.

    The right-hand side is evaluated on the induced-chain quotient with
    ``nu`` lifted to quotient states through their underlying state. The
    report also carries the until probability truncated at ``len(word)``,
    ``len(word) + 1`` and ``depth_bound`` steps. Equality is reported, not
    asserted.
    """
    word = pfa.check_word(word)
    if not word:
        raise EmptyWordError("the formula construction needs a nonempty word")
    n = len(word)
    if depth_bound is None:
        depth_bound = n + 2
    if depth_bound < n + 1:
        raise BoundError(f"depth bound must be at least {n + 1}, got {depth_bound}")
    lhs = acceptance_probability(pfa, word)
    mdp, _ = pfa_to_mdp(pfa)
    sch, _ = word_to_scheduler(pfa, word, default_action)
    chain = induced_chain(mdp, sch, depth_bound)
    labels = lift_labels(canonical_assignment(pfa), chain, lambda x: x[0])
    phi = word_to_formula(word)

    per_state = mc_path_probabilities(chain, labels, phi)
    rhs = sum((w * per_state[s] for s, w in chain.initial.items()), nx.ZERO)

    target = check_mc(chain, labels, phi.right)
    bounds = []
    for k in sorted({n, n + 1, depth_bound}):
        vals = bounded_until(chain, chain.states, target, k)
        bounds.append((k, sum((w * vals[s] for s, w in chain.initial.items()), nx.ZERO)))
    return VerificationReport("32", lhs, rhs, _default_name(sch), depth_bound, tuple(bounds))


def build_reduction_instance(pfa: PFA, word: Sequence[str], p) -> ReductionInstance:
    word = pfa.check_word(word)
    p = nx.to_prob(p)
    formula = ProbOp(">", p, word_to_formula(word))
    mdp, accepting = pfa_to_mdp(pfa)
    sch, _ = word_to_scheduler(pfa, word)
    return ReductionInstance(
        mdp=mdp,
        nu=canonical_assignment(pfa),
        formula=formula,
        scheduler=sch,
        word=word,
        threshold=p,
        accepting=accepting,
        acceptance_probability=acceptance_probability(pfa, word),
    )
