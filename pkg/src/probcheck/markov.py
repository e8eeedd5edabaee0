"""Markov chains, MDPs, schedulers and the chains schedulers induce."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple

from . import numerics as nx
from .automata import PFA
from .errors import (
    BoundError,
    ConsistencyError,
    ModelError,
    PathError,
    SchedulerError,
    StateError,
)

State = Hashable


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """A finite discrete-time Markov chain.

    ``transitions[s]`` lists ``(successor, probability)`` pairs with strictly
    positive probabilities summing to one. ``labels`` maps atomic
    propositions to state sets; ``initial`` is an optional distribution.
    """

    states: Tuple[State, ...]
    transitions: Mapping[State, Tuple[Tuple[State, Fraction], ...]]
    labels: Mapping[str, frozenset] = field(default_factory=dict)
    initial: Optional[Mapping[State, Fraction]] = None

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        known = set(states)
        if len(known) != len(states):
            raise ModelError("duplicate chain states")
        trans = {}
        for s in states:
            merged: Dict[State, Fraction] = {}
            for t, p in self.transitions.get(s, ()):
                if t not in known:
                    raise StateError(f"transition from {s!r} to unknown state {t!r}")
                p = nx.to_prob(p)
                if p:
                    merged[t] = merged.get(t, nx.ZERO) + p
            if not merged:
                raise ModelError(f"state {s!r} has no outgoing transition")
            if sum(merged.values()) != 1:
                raise ModelError(f"outgoing probabilities of {s!r} sum to {sum(merged.values())}")
            trans[s] = tuple(merged.items())
        extra = set(self.transitions) - known
        if extra:
            raise StateError(f"transitions given for unknown states {sorted(map(str, extra))}")
        object.__setattr__(self, "transitions", trans)
        labels = {ap: frozenset(ss) for ap, ss in dict(self.labels).items()}
        for ap, ss in labels.items():
            if not ss <= known:
                raise StateError(f"label {ap!r} names unknown states")
        object.__setattr__(self, "labels", labels)
        if self.initial is not None:
            init = {s: nx.to_prob(p) for s, p in dict(self.initial).items() if p}
            if not set(init) <= known or sum(init.values()) != 1:
                raise ModelError("initial distribution is invalid")
            object.__setattr__(self, "initial", init)

    def successors(self, s: State) -> Tuple[Tuple[State, Fraction], ...]:
        try:
            return self.transitions[s]
        except KeyError:
            raise StateError(f"unknown state {s!r}") from None

    def probability(self, s: State, t: State) -> Fraction:
        return dict(self.successors(s)).get(t, nx.ZERO)

    def structurally_equal(self, other: "MarkovChain") -> bool:
        return (
            self.states == other.states
            and all(dict(self.transitions[s]) == dict(other.transitions[s]) for s in self.states)
            and self.labels == other.labels
            and self.initial == other.initial
        )


@dataclass(frozen=True, eq=False)
class MDP:
    """A finite MDP ``(S, Act, P, iota_init)``.

    ``trans[(s, a)]`` is a row over ``states``; a missing or all-zero row
    means ``a`` is not enabled in ``s``. Rows must sum to exactly 0 or 1.
    """

    states: Tuple[str, ...]
    actions: Tuple[str, ...]
    trans: Mapping[Tuple[str, str], nx.RowVector]
    initial: nx.RowVector
    labels: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        states = tuple(self.states)
        actions = tuple(self.actions)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        n = len(states)
        if n == 0 or len(set(states)) != n:
            raise ModelError("MDP states must be nonempty and distinct")
        if len(set(actions)) != len(actions):
            raise ModelError("duplicate action names")
        trans = {}
        for (s, a), row in dict(self.trans).items():
            if s not in states:
                raise StateError(f"unknown state {s!r}")
            if a not in actions:
                raise ModelError(f"unknown action {a!r}")
            row = nx.vector(row)
            if len(row) != n or any(not nx.ZERO <= p <= nx.ONE for p in row):
                raise ModelError(f"row ({s}, {a}) is not a vector of probabilities over S")
            total = sum(row, nx.ZERO)
            if total not in (0, 1):
                raise ModelError(f"row ({s}, {a}) sums to {total}; must be 0 or 1")
            if total == 1:
                trans[(s, a)] = row
        object.__setattr__(self, "trans", trans)
        enabled = {s: tuple(a for a in actions if (s, a) in trans) for s in states}
        for s, acts in enabled.items():
            if not acts:
                raise ModelError(f"state {s!r} has no enabled action")
        object.__setattr__(self, "_enabled", enabled)
        init = nx.vector(self.initial)
        if len(init) != n or not nx.validate_distribution(init):
            raise ModelError("initial vector is not a distribution over the states")
        object.__setattr__(self, "initial", init)
        labels = {ap: frozenset(ss) for ap, ss in dict(self.labels).items()}
        for ap, ss in labels.items():
            if not ss <= set(states):
                raise StateError(f"label {ap!r} names unknown states")
        object.__setattr__(self, "labels", labels)

    def index(self, s: str) -> int:
        try:
            return self.states.index(s)
        except ValueError:
            raise StateError(f"unknown state {s!r}") from None

    def enabled(self, s: str) -> Tuple[str, ...]:
        """Enabled actions of ``s`` in declaration order."""
        try:
            return self._enabled[s]
        except KeyError:
            raise StateError(f"unknown state {s!r}") from None

    def row(self, s: str, a: str) -> nx.RowVector:
        try:
            return self.trans[(s, a)]
        except KeyError:
            raise SchedulerError(f"action {a!r} is not enabled in state {s!r}") from None

    def successors(self, s: str, a: str) -> Tuple[Tuple[str, Fraction], ...]:
        return tuple((t, p) for t, p in zip(self.states, self.row(s, a)) if p)

    def structurally_equal(self, other: "MDP") -> bool:
        return (
            self.states == other.states
            and self.actions == other.actions
            and self.trans == other.trans
            and self.initial == other.initial
            and self.labels == other.labels
        )


def enabled_actions(mdp: MDP, s: str) -> frozenset:
    return frozenset(mdp.enabled(s))


def first_enabled(mdp: MDP, s: str) -> str:
    """The lexicographically smallest enabled action name."""
    return min(mdp.enabled(s))


DEPTH_BASED = "depth_based"
MEMORYLESS = "memoryless"


@dataclass(frozen=True)
class Scheduler:
    """A deterministic scheduler from the two finitely representable classes.

    A depth-based scheduler plays ``depth_actions[i]`` after ``i`` steps and
    falls back to the per-state ``default`` from depth ``horizon`` onward. A
    memoryless scheduler is the special case with no depth actions.
    """

    kind: str
    depth_actions: Tuple[str, ...] = ()
    default: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (DEPTH_BASED, MEMORYLESS):
            raise SchedulerError(f"unknown scheduler kind {self.kind!r}")
        object.__setattr__(self, "depth_actions", tuple(self.depth_actions))
        object.__setattr__(self, "default", dict(self.default))
        if self.kind == MEMORYLESS and self.depth_actions:
            raise SchedulerError("a memoryless scheduler has no depth actions")

    def __hash__(self):
        return hash((self.kind, self.depth_actions, tuple(sorted(self.default.items()))))

    @classmethod
    def memoryless(cls, choice: Mapping[str, str]) -> "Scheduler":
        return cls(MEMORYLESS, (), choice)

    @classmethod
    def depth_based(cls, actions: Sequence[str], default: Mapping[str, str]) -> "Scheduler":
        return cls(DEPTH_BASED, tuple(actions), default)

    @property
    def horizon(self) -> int:
        return len(self.depth_actions)

    def action_at(self, state: str, depth: int) -> str:
        if depth < self.horizon:
            return self.depth_actions[depth]
        try:
            return self.default[state]
        except KeyError:
            raise SchedulerError(f"no default action for state {state!r}") from None

    def choose(self, history: Sequence[str]) -> str:
        """The action for the finite history ``s_0 ... s_n`` (a map S+ -> Act)."""
        if not history:
            raise SchedulerError("histories are nonempty")
        return self.action_at(history[-1], len(history) - 1)

    def validate(self, mdp: MDP) -> None:
        for s in mdp.states:
            a = self.default.get(s)
            if a is None:
                raise SchedulerError(f"scheduler has no default action for {s!r}")
            if a not in mdp.enabled(s):
                raise SchedulerError(f"default action {a!r} not enabled in {s!r}")
        for a in self.depth_actions:
            if a not in mdp.actions:
                raise SchedulerError(f"depth action {a!r} is not an action of the MDP")


def default_choice(mdp: MDP, action: Optional[str] = None) -> Dict[str, str]:
    """Per-state default: ``action`` where enabled, else the first enabled one."""
    return {
        s: action if action is not None and action in mdp.enabled(s) else first_enabled(mdp, s)
        for s in mdp.states
    }


@dataclass(frozen=True)
class FinitePath:
    states: Tuple[State, ...]
    actions: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.states:
            raise PathError("a path has at least one state")
        if self.actions and len(self.actions) != len(self.states) - 1:
            raise PathError("a path with actions needs exactly one action per step")

    def concat(self, other: "FinitePath") -> "FinitePath":
        if self.states[-1] != other.states[0]:
            raise PathError("paths do not share the junction state")
        return FinitePath(self.states + other.states[1:], self.actions + other.actions)


def pfa_to_mdp(pfa: PFA) -> Tuple[MDP, frozenset]:
    """View a PFA as an MDP with states Q, actions Sigma, plus its accepting set."""
    trans = {
        (q, a): pfa.matrices[a][i]
        for a in pfa.alphabet
        for i, q in enumerate(pfa.states)
    }
    return MDP(pfa.states, pfa.alphabet, trans, pfa.initial), pfa.accepting


def induced_chain(mdp: MDP, sch: Scheduler, depth_bound: int) -> MarkovChain:
    """Finite quotient of the chain induced by ``sch``.

    Quotient states are ``(state, min(depth, depth_bound))`` reachable from
    some ``(s, 0)``. Since the scheduler only looks at the current state and
    the path length, and plays its memoryless default from ``depth_bound``
    on, the quotient is exact. The initial distribution is ``iota_init`` on
    depth 0.
    """
    if depth_bound < sch.horizon:
        raise BoundError(f"depth bound {depth_bound} below scheduler horizon {sch.horizon}")
    sch.validate(mdp)
    order = [(s, 0) for s in mdp.states]
    seen = set(order)
    trans = {}
    i = 0
    while i < len(order):
        s, d = order[i]
        i += 1
        a = sch.action_at(s, d)
        if a not in mdp.enabled(s):
            raise SchedulerError(f"action {a!r} chosen at depth {d} is not enabled in {s!r}")
        nd = min(d + 1, depth_bound)
        succ = tuple(((t, nd), p) for t, p in mdp.successors(s, a))
        trans[(s, d)] = succ
        for t, _ in succ:
            if t not in seen:
                seen.add(t)
                order.append(t)
    order.sort(key=lambda sd: (sd[1], mdp.index(sd[0])))
    initial = {(s, 0): p for s, p in zip(mdp.states, mdp.initial) if p}
    return MarkovChain(tuple(order), trans, {}, initial)


def lift_labels(labels: Mapping[str, Iterable], chain: MarkovChain, underlying) -> Dict[str, frozenset]:
    """Label chain states by the labels of their underlying model state.

    ``underlying`` maps a chain state to the model state it stands for.
    """
    out = {}
    for ap, ss in labels.items():
        ss = set(ss)
        out[ap] = frozenset(x for x in chain.states if underlying(x) in ss)
    return out


def path_probability(mc: MarkovChain, path: FinitePath) -> Fraction:
    p = nx.ONE
    for s, t in zip(path.states, path.states[1:]):
        step = mc.probability(s, t)
        if not step:
            raise PathError(f"no transition {s!r} -> {t!r}")
        p *= step
    return p


def step_distribution(mc: MarkovChain, dist: Mapping[State, Fraction]) -> Dict[State, Fraction]:
    out: Dict[State, Fraction] = {}
    for s, w in dist.items():
        if w:
            for t, p in mc.successors(s):
                out[t] = out.get(t, nx.ZERO) + w * p
    return out


def accepting_paths_forward(mdp: MDP, sch: Scheduler, n: int, accepting: Iterable[str]) -> Fraction:
    """Mass of ``n``-step scheduler paths ending in ``accepting``, by vector propagation."""
    accepting = set(accepting)
    dist = list(mdp.initial)
    for d in range(n):
        nxt = [nx.ZERO] * len(mdp.states)
        for s, w in zip(mdp.states, dist):
            if w:
                for j, p in enumerate(mdp.row(s, sch.action_at(s, d))):
                    if p:
                        nxt[j] += w * p
        dist = nxt
    return sum((w for s, w in zip(mdp.states, dist) if s in accepting), nx.ZERO)


def accepting_paths_enumerated(mdp: MDP, sch: Scheduler, n: int, accepting: Iterable[str]) -> Fraction:
    """Same quantity as :func:`accepting_paths_forward`, by explicit path enumeration.

    Each path's actions come from :meth:`Scheduler.choose` on the full
    history, and its weight is the cylinder product of its steps.
    """
    accepting = set(accepting)
    total = nx.ZERO

    def walk(history, weight):
        nonlocal total
        if len(history) == n + 1:
            if history[-1] in accepting:
                total += weight
            return
        s = history[-1]
        for t, p in mdp.successors(s, sch.choose(history)):
            walk(history + (t,), weight * p)

    for s, w in zip(mdp.states, mdp.initial):
        if w:
            walk((s,), w)
    return total


def accepting_paths_probability(
    mdp: MDP,
    sch: Scheduler,
    n: int,
    accepting: Iterable[str],
    enumeration_limit: int = 4096,
) -> Fraction:
    """``sum_s iota(s) * P_sch(n-step paths from s ending in accepting)``.

    Computed by forward propagation; when ``|S| ** n`` is at most
    ``enumeration_limit`` the explicit path enumeration runs too and the two
    must agree exactly.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    accepting = frozenset(accepting)
    value = accepting_paths_forward(mdp, sch, n, accepting)
    if len(mdp.states) ** n <= enumeration_limit:
        other = accepting_paths_enumerated(mdp, sch, n, accepting)
        if other != value:
            raise ConsistencyError(f"forward propagation gave {value}, enumeration {other}")
    return value
