"""Abstract syntax for PCTL and PCTL* formulas, plus the canonical printer.

Path formulas are kept in one canonical shape so that printing and parsing
are mutually inverse: a PCTL* connective whose operands are all embedded
state formulas is always folded into the state level (``!a`` is
``Embed(Not(a))``, never ``PNot(Embed(a))``) and ``X``/``U`` over state
formulas are the PCTL forms :class:`Next` and :class:`Until`. The
constructors of the PCTL* classes reject non-canonical operands; use
:func:`path_not`, :func:`path_and`, :func:`path_next` and
:func:`path_until` to build path formulas from arbitrary parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from ..numerics import to_prob

COMPARISONS = (">", ">=")


class Formula:
    __slots__ = ()

    def __str__(self):
        return serialize(self)


class StateFormula(Formula):
    __slots__ = ()


class PathFormula(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(StateFormula):
    pass


TRUE = TrueF()


@dataclass(frozen=True)
class Atom(StateFormula):
    name: str


@dataclass(frozen=True)
class Not(StateFormula):
    operand: StateFormula

    def __post_init__(self):
        _want_state(self.operand)


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula

    def __post_init__(self):
        _want_state(self.left)
        _want_state(self.right)


@dataclass(frozen=True)
class ProbOp(StateFormula):
    cmp: str
    bound: Fraction
    path: PathFormula

    def __post_init__(self):
        if self.cmp not in COMPARISONS:
            raise ValueError(f"comparison must be one of {COMPARISONS}, got {self.cmp!r}")
        object.__setattr__(self, "bound", to_prob(self.bound))
        _want_path(self.path)

    def holds(self, p: Fraction) -> bool:
        return p > self.bound if self.cmp == ">" else p >= self.bound


@dataclass(frozen=True)
class Next(PathFormula):
    operand: StateFormula

    def __post_init__(self):
        _want_state(self.operand)


@dataclass(frozen=True)
class Until(PathFormula):
    left: StateFormula
    right: StateFormula

    def __post_init__(self):
        _want_state(self.left)
        _want_state(self.right)


@dataclass(frozen=True)
class Embed(PathFormula):
    """A state formula used as a path formula (evaluated at the first state)."""

    state: StateFormula

    def __post_init__(self):
        _want_state(self.state)


@dataclass(frozen=True)
class PNot(PathFormula):
    operand: PathFormula

    def __post_init__(self):
        _want_path(self.operand)
        if isinstance(self.operand, Embed):
            raise ValueError("negation of an embedded state formula belongs at state level")


@dataclass(frozen=True)
class PAnd(PathFormula):
    left: PathFormula
    right: PathFormula

    def __post_init__(self):
        _want_path(self.left)
        _want_path(self.right)
        if isinstance(self.left, Embed) and isinstance(self.right, Embed):
            raise ValueError("conjunction of embedded state formulas belongs at state level")


@dataclass(frozen=True)
class PNext(PathFormula):
    operand: PathFormula

    def __post_init__(self):
        _want_path(self.operand)
        if isinstance(self.operand, Embed):
            raise ValueError("X over a state formula is the PCTL Next")


@dataclass(frozen=True)
class PUntil(PathFormula):
    left: PathFormula
    right: PathFormula

    def __post_init__(self):
        _want_path(self.left)
        _want_path(self.right)
        if isinstance(self.left, Embed) and isinstance(self.right, Embed):
            raise ValueError("U over two state formulas is the PCTL Until")


def _want_state(x):
    if not isinstance(x, StateFormula):
        raise TypeError(f"expected a state formula, got {type(x).__name__}")


def _want_path(x):
    if not isinstance(x, PathFormula):
        raise TypeError(f"expected a path formula, got {type(x).__name__}")


def as_path(x: Formula) -> PathFormula:
    return Embed(x) if isinstance(x, StateFormula) else x


def path_not(x: Formula) -> PathFormula:
    x = as_path(x)
    if isinstance(x, Embed):
        return Embed(Not(x.state))
    return PNot(x)


def path_and(x: Formula, y: Formula) -> PathFormula:
    x, y = as_path(x), as_path(y)
    if isinstance(x, Embed) and isinstance(y, Embed):
        return Embed(And(x.state, y.state))
    return PAnd(x, y)


def path_next(x: Formula) -> PathFormula:
    x = as_path(x)
    if isinstance(x, Embed):
        return Next(x.state)
    return PNext(x)


def path_until(x: Formula, y: Formula) -> PathFormula:
    x, y = as_path(x), as_path(y)
    if isinstance(x, Embed) and isinstance(y, Embed):
        return Until(x.state, y.state)
    return PUntil(x, y)


def is_pctl(f: Formula) -> bool:
    """True iff every path formula inside ``f`` is a PCTL ``X`` or ``U``."""
    if isinstance(f, (TrueF, Atom)):
        return True
    if isinstance(f, Not):
        return is_pctl(f.operand)
    if isinstance(f, And):
        return is_pctl(f.left) and is_pctl(f.right)
    if isinstance(f, ProbOp):
        return isinstance(f.path, (Next, Until)) and is_pctl(f.path)
    if isinstance(f, Next):
        return is_pctl(f.operand)
    if isinstance(f, Until):
        return is_pctl(f.left) and is_pctl(f.right)
    return False


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    yield f
    for name in getattr(f, "__dataclass_fields__", {}):
        child = getattr(f, name)
        if isinstance(child, Formula):
            yield from subformulas(child)


def _fmt_bound(r: Fraction) -> str:
    return str(r)


def _wrap(p: PathFormula) -> str:
    text = serialize(p)
    return f"({text})" if isinstance(p, (Until, PUntil)) else text


def serialize(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + serialize(f.operand)
    if isinstance(f, And):
        return f"({serialize(f.left)} & {serialize(f.right)})"
    if isinstance(f, ProbOp):
        return f"P{f.cmp}{_fmt_bound(f.bound)} [ {serialize(f.path)} ]"
    if isinstance(f, Next):
        return "X " + serialize(f.operand)
    if isinstance(f, Until):
        return f"{serialize(f.left)} U {serialize(f.right)}"
    if isinstance(f, Embed):
        return serialize(f.state)
    if isinstance(f, PNot):
        return "!" + _wrap(f.operand)
    if isinstance(f, PAnd):
        return f"({_wrap(f.left)} & {_wrap(f.right)})"
    if isinstance(f, PNext):
        return "X " + _wrap(f.operand)
    if isinstance(f, PUntil):
        return f"{_wrap(f.left)} U {_wrap(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


AnyFormula = Union[StateFormula, PathFormula]
