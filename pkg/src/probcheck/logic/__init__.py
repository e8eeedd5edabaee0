"""PCTL/PCTL* syntax, parsing and exact model checking."""

from .checking import (
    Assignment,
    bounded_until,
    check_mc,
    check_mc_initial,
    check_mdp,
    mc_path_probabilities,
    mdp_min_probabilities,
    min_next,
    min_prob0_states,
    min_until,
    prob0_states,
    prob1_states,
    prob_next,
    prob_until,
)
from .parser import parse_formula, parse_path_formula, tokenize
from .syntax import (
    TRUE,
    And,
    Atom,
    Embed,
    Formula,
    Next,
    Not,
    PAnd,
    PathFormula,
    PNext,
    PNot,
    ProbOp,
    PUntil,
    StateFormula,
    TrueF,
    Until,
    is_pctl,
    path_and,
    path_next,
    path_not,
    path_until,
    serialize,
    subformulas,
)
