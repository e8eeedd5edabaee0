"""Exact rational kernel: conversion, dense matrices and Gaussian elimination.

Rationals are :class:`fractions.Fraction` (always normalized, positive
denominator). A matrix is a tuple of equal-length row tuples, a vector is a
plain tuple; both are immutable so models can share them freely.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence, Tuple

from .errors import DimensionError, ProbabilityError, SingularSystemError

Rational = Fraction
Prob = Fraction
RowVector = Tuple[Fraction, ...]
Matrix = Tuple[Tuple[Fraction, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, rationals and strings such as ``"3/4"``, ``"2"`` or
    ``"0.125"`` (decimals are converted exactly). Floats are refused because
    their binary expansion is almost never the number the user meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def to_prob(value) -> Fraction:
    x = to_rational(value)
    if not ZERO <= x <= ONE:
        raise ProbabilityError(f"probability {x} outside [0, 1]")
    return x


def format_fraction(x: Fraction) -> str:
    """Render as ``p/q`` even for integers (``0/1``, ``1/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def format_decimal(x: Fraction) -> str:
    return format(float(x), ".10g")


def vector(entries: Iterable) -> RowVector:
    return tuple(to_rational(e) for e in entries)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionError("matrix rows have different lengths")
    return out


def shape(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((ZERO,) * cols for _ in range(rows))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise DimensionError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    cols = tuple(zip(*b)) if b else ()
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), ZERO) for col in cols)
        for row in a
    )


def vec_mat(v: Sequence[Fraction], m: Matrix) -> RowVector:
    """Row vector times matrix."""
    rows, cols = shape(m)
    if len(v) != rows:
        raise DimensionError(f"vector of length {len(v)} against {rows}x{cols} matrix")
    out = [ZERO] * cols
    for x, row in zip(v, m):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return tuple(out)


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> RowVector:
    """Matrix times column vector."""
    rows, cols = shape(m)
    if len(v) != cols:
        raise DimensionError(f"{rows}x{cols} matrix against vector of length {len(v)}")
    return tuple(sum((x * y for x, y in zip(row, v)), ZERO) for row in m)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"vectors of length {len(u)} and {len(v)}")
    return sum((x * y for x, y in zip(u, v)), ZERO)


def validate_distribution(v: Sequence[Fraction]) -> bool:
    return all(ZERO <= x <= ONE for x in v) and sum(v, ZERO) == ONE


def is_stochastic(m: Matrix) -> bool:
    return all(validate_distribution(row) for row in m)


def solve_linear_system(a: Matrix, b: Sequence[Fraction]) -> RowVector:
    """Solve ``a @ x = b`` exactly by Gauss-Jordan elimination.

    The pivot in each column is the first nonzero entry at or below the
    diagonal; with exact arithmetic no magnitude-based pivoting is needed.
    """
    n, cols = shape(a)
    if n != cols:
        raise DimensionError(f"coefficient matrix is {n}x{cols}, not square")
    if len(b) != n:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {n}")
    rows = [[to_rational(x) for x in r] + [to_rational(y)] for r, y in zip(a, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError(f"no pivot in column {col}; system is singular")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        prow = rows[col]
        inv = ONE / prow[col]
        if inv != 1:
            prow[:] = [x * inv for x in prow]
        for r in range(n):
            if r != col:
                factor = rows[r][col]
                if factor:
                    target = rows[r]
                    for k in range(col, n + 1):
                        if prow[k]:
                            target[k] -= factor * prow[k]
    return tuple(r[n] for r in rows)
