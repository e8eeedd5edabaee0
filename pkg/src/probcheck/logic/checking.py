"""Exact PCTL model checking over finite Markov chains and MDPs.

Chains: satisfaction sets bottom-up; ``X`` by one-step mass, ``U`` by
graph precomputation (Prob0/Prob1) followed by a single exact linear solve.

MDPs: a state satisfies ``P~r [phi]`` iff every scheduler gives ``phi``
probability ``~ r``. Since ``~`` is ``>`` or ``>=``, that is a test on the
minimal probability, which memoryless deterministic schedulers attain for
``X`` and ``U``; minima for ``U`` come from policy iteration with exact
per-policy solves.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, Iterable, Mapping, Optional, Set, Tuple

from .. import numerics as nx
from ..errors import UnsupportedFragmentError
from ..markov import MDP, MarkovChain
from .syntax import And, Atom, Next, Not, ProbOp, StateFormula, TrueF, Until, serialize

Assignment = Mapping[str, Iterable[Hashable]]


# ----------------------------------------------------------------------
# Markov chains


def _predecessors(mc: MarkovChain) -> Dict[Hashable, Set[Hashable]]:
    pre = {s: set() for s in mc.states}
    for s in mc.states:
        for t, _ in mc.successors(s):
            pre[t].add(s)
    return pre


def prob0_states(mc: MarkovChain, a: Iterable, b: Iterable) -> FrozenSet:
    """States from which no path reaches ``b`` while staying in ``a``."""
    a, b = set(a), set(b)
    pre = _predecessors(mc)
    reach = set(s for s in mc.states if s in b)
    stack = list(reach)
    while stack:
        t = stack.pop()
        for s in pre[t]:
            if s not in reach and s in a:
                reach.add(s)
                stack.append(s)
    return frozenset(s for s in mc.states if s not in reach)


def prob1_states(mc: MarkovChain, a: Iterable, b: Iterable, no: Optional[Iterable] = None) -> FrozenSet:
    """States satisfying ``a U b`` with probability one.

    Complement of the states that can reach a Prob0 state through
    ``a``-and-not-``b`` states.
    """
    a, b = set(a), set(b)
    no = set(prob0_states(mc, a, b) if no is None else no)
    pre = _predecessors(mc)
    bad = set(no)
    stack = list(bad)
    while stack:
        t = stack.pop()
        for s in pre[t]:
            if s not in bad and s in a and s not in b:
                bad.add(s)
                stack.append(s)
    return frozenset(s for s in mc.states if s not in bad)


def prob_next(mc: MarkovChain, target: Iterable) -> Dict[Hashable, Fraction]:
    target = set(target)
    return {
        s: sum((p for t, p in mc.successors(s) if t in target), nx.ZERO)
        for s in mc.states
    }


def prob_until(mc: MarkovChain, a: Iterable, b: Iterable) -> Dict[Hashable, Fraction]:
    a, b = set(a), set(b)
    no = prob0_states(mc, a, b)
    yes = prob1_states(mc, a, b, no)
    result = {s: (nx.ONE if s in yes else nx.ZERO) for s in mc.states}
    maybe = [s for s in mc.states if s not in no and s not in yes]
    if not maybe:
        return result
    index = {s: i for i, s in enumerate(maybe)}
    n = len(maybe)
    rows = []
    rhs = []
    for s in maybe:
        row = [nx.ZERO] * n
        row[index[s]] = nx.ONE
        c = nx.ZERO
        for t, p in mc.successors(s):
            if t in index:
                row[index[t]] -= p
            elif t in yes:
                c += p
        rows.append(tuple(row))
        rhs.append(c)
    x = nx.solve_linear_system(tuple(rows), rhs)
    for s, v in zip(maybe, x):
        result[s] = v
    return result


def bounded_until(mc: MarkovChain, a: Iterable, b: Iterable, k: int) -> Dict[Hashable, Fraction]:
    """Probability of reaching ``b`` within ``k`` steps through ``a``-states.

    These are lower bounds on :func:`prob_until`, nondecreasing in ``k``.
    """
    a, b = set(a), set(b)
    x = {s: (nx.ONE if s in b else nx.ZERO) for s in mc.states}
    for _ in range(k):
        x = {
            s: nx.ONE if s in b
            else sum((p * x[t] for t, p in mc.successors(s)), nx.ZERO) if s in a
            else nx.ZERO
            for s in mc.states
        }
    return x


def _labels(nu: Optional[Assignment], fallback: Mapping) -> Dict[str, frozenset]:
    source = fallback if nu is None else nu
    return {ap: frozenset(ss) for ap, ss in source.items()}


def _require_pctl(f: ProbOp):
    if not isinstance(f.path, (Next, Until)):
        raise UnsupportedFragmentError(
            f"only X and U path formulas can be checked; got {serialize(f.path)!r}"
        )


class _Sat:
    """Bottom-up satisfaction sets, memoized per subformula."""

    def __init__(self, states, labels, path_values):
        self.states = tuple(states)
        self.all = frozenset(self.states)
        self.labels = labels
        self.path_values = path_values
        self.memo: Dict[StateFormula, FrozenSet] = {}

    def __call__(self, f: StateFormula) -> FrozenSet:
        hit = self.memo.get(f)
        if hit is None:
            hit = self.memo[f] = self._compute(f)
        return hit

    def _compute(self, f):
        if isinstance(f, TrueF):
            return self.all
        if isinstance(f, Atom):
            return self.labels.get(f.name, frozenset()) & self.all
        if isinstance(f, Not):
            return self.all - self(f.operand)
        if isinstance(f, And):
            return self(f.left) & self(f.right)
        if isinstance(f, ProbOp):
            values = self.probabilities(f)
            return frozenset(s for s in self.states if f.holds(values[s]))
        raise TypeError(f"not a state formula: {f!r}")

    def probabilities(self, f: ProbOp) -> Dict[Hashable, Fraction]:
        _require_pctl(f)
        return self.path_values(f.path, self)


def _mc_path_values(mc: MarkovChain):
    def values(path, sat):
        if isinstance(path, Next):
            return prob_next(mc, sat(path.operand))
        return prob_until(mc, sat(path.left), sat(path.right))

    return values


def check_mc(mc: MarkovChain, nu: Optional[Assignment], phi: StateFormula) -> FrozenSet:
    """Satisfaction set of ``phi``; ``nu=None`` uses the chain's own labels."""
    return _Sat(mc.states, _labels(nu, mc.labels), _mc_path_values(mc))(phi)


def mc_path_probabilities(mc: MarkovChain, nu: Optional[Assignment], path) -> Dict[Hashable, Fraction]:
    """Per-state probability of a PCTL path formula (``Next`` or ``Until``)."""
    sat = _Sat(mc.states, _labels(nu, mc.labels), _mc_path_values(mc))
    return sat.probabilities(ProbOp(">=", 0, path))


def check_mc_initial(mc: MarkovChain, nu: Optional[Assignment], phi: StateFormula) -> Tuple[FrozenSet, bool]:
    """Satisfaction set and the verdict for the chain's initial distribution.

    For ``P~r [phi]`` the verdict compares the initial-weighted probability
    with ``r``; for any other formula it requires every initial state to
    satisfy it.
    """
    if mc.initial is None:
        raise ValueError("chain has no initial distribution")
    sat = _Sat(mc.states, _labels(nu, mc.labels), _mc_path_values(mc))
    result = sat(phi)
    if isinstance(phi, ProbOp):
        values = sat.probabilities(phi)
        total = sum((w * values[s] for s, w in mc.initial.items()), nx.ZERO)
        return result, phi.holds(total)
    return result, all(s in result for s in mc.initial)


# ----------------------------------------------------------------------
# MDPs


def min_next(mdp: MDP, target: Iterable[str]) -> Tuple[Dict[str, Fraction], Dict[str, str]]:
    target = set(target)
    values, policy = {}, {}
    for s in mdp.states:
        best = None
        for a in sorted(mdp.enabled(s)):
            v = sum((p for t, p in mdp.successors(s, a) if t in target), nx.ZERO)
            if best is None or v < best:
                best, policy[s] = v, a
        values[s] = best
    return values, policy


def min_prob0_states(mdp: MDP, a: Iterable[str], b: Iterable[str]) -> FrozenSet:
    """States where some scheduler avoids ``a U b`` almost surely.

    Complement of the states that reach ``b`` with positive probability
    under every scheduler.
    """
    a, b = set(a), set(b)
    forced = set(s for s in mdp.states if s in b)
    changed = True
    while changed:
        changed = False
        for s in mdp.states:
            if s in forced or s not in a:
                continue
            if all(any(t in forced for t, _ in mdp.successors(s, act)) for act in mdp.enabled(s)):
                forced.add(s)
                changed = True
    return frozenset(s for s in mdp.states if s not in forced)


def _evaluate_policy(mdp, policy, maybe, yes):
    index = {s: i for i, s in enumerate(maybe)}
    n = len(maybe)
    rows, rhs = [], []
    for s in maybe:
        row = [nx.ZERO] * n
        row[index[s]] = nx.ONE
        c = nx.ZERO
        for t, p in mdp.successors(s, policy[s]):
            if t in index:
                row[index[t]] -= p
            elif t in yes:
                c += p
        rows.append(tuple(row))
        rhs.append(c)
    return dict(zip(maybe, nx.solve_linear_system(tuple(rows), rhs)))


def min_until(mdp: MDP, a: Iterable[str], b: Iterable[str]) -> Tuple[Dict[str, Fraction], Dict[str, str]]:
    """Minimal probability of ``a U b`` per state, with a minimizing policy.

    Policy iteration: start from the lexicographically first enabled action,
    switch a state only when its best one-step backup strictly lowers its
    value (ties keep the incumbent), stop when nothing switches. States where
    the minimum is zero are removed first, which leaves no end component
    among the remaining states, so every per-policy system is nonsingular.
    """
    a, b = set(a), set(b)
    yes = frozenset(s for s in mdp.states if s in b)
    no = min_prob0_states(mdp, a, b)
    maybe = [s for s in mdp.states if s not in yes and s not in no]
    policy = {s: min(mdp.enabled(s)) for s in mdp.states}
    for s in no:
        if s in a:
            # an action that never touches the forced region keeps the value at zero
            policy[s] = next(
                act for act in sorted(mdp.enabled(s))
                if all(t in no for t, _ in mdp.successors(s, act))
            )
    fixed = {s: nx.ONE for s in yes}
    fixed.update({s: nx.ZERO for s in no})
    values = dict(fixed)
    while True:
        values = dict(fixed)
        if maybe:
            values.update(_evaluate_policy(mdp, policy, maybe, yes))
        switched = False
        for s in maybe:
            incumbent = values[s]
            best_a, best_v = None, incumbent
            for act in sorted(mdp.enabled(s)):
                v = sum((p * values[t] for t, p in mdp.successors(s, act)), nx.ZERO)
                if v < best_v:
                    best_a, best_v = act, v
            if best_a is not None:
                policy[s] = best_a
                switched = True
        if not switched:
            return values, policy


def _mdp_path_values(mdp: MDP):
    def values(path, sat):
        if isinstance(path, Next):
            return min_next(mdp, sat(path.operand))[0]
        return min_until(mdp, sat(path.left), sat(path.right))[0]

    return values


def check_mdp(mdp: MDP, nu: Optional[Assignment], phi: StateFormula) -> Tuple[FrozenSet, bool]:
    """Satisfaction set under the for-all-schedulers reading, plus the initial verdict.

    The initial verdict for ``P~r [phi]`` tests the ``iota_init``-weighted
    sum of per-state probabilities under the minimizing scheduler (a single
    memoryless scheduler minimizes every state at once). Any other formula
    must hold in every state in the support of ``iota_init``.
    """
    sat = _Sat(mdp.states, _labels(nu, mdp.labels), _mdp_path_values(mdp))
    result = sat(phi)
    if isinstance(phi, ProbOp):
        values = sat.probabilities(phi)
        total = sum((w * values[s] for s, w in zip(mdp.states, mdp.initial)), nx.ZERO)
        return result, phi.holds(total)
    return result, all(s in result for s, w in zip(mdp.states, mdp.initial) if w)


def mdp_min_probabilities(mdp: MDP, nu: Optional[Assignment], path) -> Dict[str, Fraction]:
    sat = _Sat(mdp.states, _labels(nu, mdp.labels), _mdp_path_values(mdp))
    return sat.probabilities(ProbOp(">=", 0, path))
