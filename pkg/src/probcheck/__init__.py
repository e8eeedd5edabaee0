"""Exact model checking for probabilistic automata, MDPs and one-counter automata."""

from .automata import PFA, CutPointSpec, acceptance_probability, bounded_emptiness_search, language_membership
from .counter import POCA, CounterRule, Configuration, pfa_to_poca, poca_acceptance_probability, validate_poca
from .markov import MDP, FinitePath, MarkovChain, Scheduler, induced_chain, pfa_to_mdp
from .reductions import (
    build_reduction_instance,
    canonical_assignment,
    verify_lemma_3_1,
    verify_lemma_3_2,
    word_to_formula,
    word_to_scheduler,
)

__version__ = "0.1.0"
