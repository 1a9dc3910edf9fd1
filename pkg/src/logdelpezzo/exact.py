"""Exact rational helpers shared by every module.

Nothing here touches floating point except :func:`decimal_str`, which only
renders an already-exact value for human reading.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class ExactArithmeticError(ArithmeticError):
    """Raised when an exact operation has no rational answer."""


def as_fraction(value: Rational | str) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to :class:`Fraction`.

    Floats are rejected on purpose.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    if any(c in text for c in ".eE"):
        raise ValueError(f"{text!r}: decimals are not accepted, use p/q")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{text!r} is not a rational of the form p/q") from exc


def format_rational(value: Rational) -> str:
    q = as_fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_str(value: Rational, digits: int = 12) -> str:
    q = as_fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits + 20
        d = Decimal(q.numerator) / Decimal(q.denominator)
        out = format(d.quantize(Decimal(1).scaleb(-digits)), "f")
    if out.startswith("-") and Decimal(out) == 0:
        out = out[1:]
    return out


def exact_sqrt(value: Rational) -> Fraction | None:
    """Square root of a nonnegative rational, or None when irrational."""
    q = as_fraction(value)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sign_after(value: Fraction, slope: Fraction) -> int:
    """Sign of ``value + slope*h`` for all sufficiently small ``h > 0``."""
    if value:
        return 1 if value > 0 else -1
    if slope:
        return 1 if slope > 0 else -1
    return 0


def solve(matrix: Sequence[Sequence[Fraction]],
          rhs: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Solve ``matrix @ X = rhs`` for square nonsingular ``matrix``.

    ``rhs`` is a list of right-hand-side columns; returns one solution per
    column.  Raises :class:`ExactArithmeticError` on a singular system.
    """
    n = len(matrix)
    cols = len(rhs)
    aug = [[Fraction(v) for v in matrix[i]] + [Fraction(rhs[c][i]) for c in range(cols)]
           for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ExactArithmeticError("singular system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        row = [v * inv for v in aug[col]]
        aug[col] = row
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], row)]
    return [[aug[i][n + c] for i in range(n)] for c in range(cols)]


def ldl_pivots(matrix: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    """Pivots of symmetric Gaussian elimination without row swaps.

    Returns None if a zero pivot appears before the end (the leading minors
    are then not all nonzero).
    """
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    pivots = []
    for k in range(n):
        p = a[k][k]
        if p == 0:
            return None
        pivots.append(p)
        for i in range(k + 1, n):
            if a[i][k] != 0:
                factor = a[i][k] / p
                for j in range(k, n):
                    a[i][j] -= factor * a[k][j]
    return pivots


def is_negative_definite(matrix: Sequence[Sequence[Fraction]]) -> bool:
    if not matrix:
        return True
    pivots = ldl_pivots(matrix)
    return pivots is not None and all(p < 0 for p in pivots)


def inertia(matrix: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Uses symmetric pivoting with 2x2 handling so zero diagonals are fine.
    """
    a = [[Fraction(v) for v in row] for row in matrix]
    pos = neg = zero = 0
    while a:
        n = len(a)
        k = next((i for i in range(n) if a[i][i] != 0), None)
        if k is not None:
            p = a[k][k]
            pos, neg = (pos + 1, neg) if p > 0 else (pos, neg + 1)
            rest = [i for i in range(n) if i != k]
            a = [[a[i][j] - a[i][k] * a[k][j] / p for j in rest] for i in rest]
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j] != 0), None)
        if pair is None:
            zero += n
            break
        i, j = pair
        # a 2x2 block [[0, c], [c, 0]] contributes one positive and one negative
        pos += 1
        neg += 1
        c = a[i][j]
        rest = [r for r in range(n) if r not in (i, j)]
        # block inverse of [[0,c],[c,0]] is [[0,1/c],[1/c,0]]
        a = [[a[r][s] - (a[r][i] * a[j][s] + a[r][j] * a[i][s]) / c for s in rest]
             for r in rest]
    return pos, neg, zero


def _integer_row(values: Sequence[Fraction]) -> list[int]:
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    return [v.numerator * (den // v.denominator) for v in values]


def _reduce_row(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        g = gcd(g, v)
    return [v // g for v in row] if g > 1 else row


def find_nonnegative_solution(a_eq: Sequence[Sequence[Fraction]],
                              b_eq: Sequence[Fraction]) -> list[Fraction] | None:
    """Exact phase-one simplex: some ``y >= 0`` with ``a_eq @ y = b_eq``, or None.

    The tableau is kept fraction-free: every row (and the cost row) is an
    integer vector known only up to a positive factor, which leaves signs,
    ratio comparisons and Bland's rule unchanged.
    """
    rows = len(a_eq)
    if rows == 0:
        return []
    nvar = len(a_eq[0])
    total = nvar + rows
    tab: list[list[int]] = []
    for i in range(rows):
        row = _integer_row([as_fraction(v) for v in a_eq[i]] + [as_fraction(b_eq[i])])
        if row[-1] < 0:
            row = [-v for v in row]
        # scaling a row only rescales its artificial variable
        art = [0] * rows
        art[i] = 1
        tab.append(row[:-1] + art + row[-1:])
    basis = [nvar + i for i in range(rows)]
    # reduced costs of minimising the sum of artificials, up to a positive factor
    cost = [0] * (total + 1)
    for j in list(range(nvar)) + [total]:
        cost[j] = -sum(tab[i][j] for i in range(rows))
    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(rows):
            e = tab[i][enter]
            if e > 0:
                if best is None:
                    best = i
                    continue
                lhs, rhs = tab[i][-1] * tab[best][enter], tab[best][-1] * e
                if lhs < rhs or (lhs == rhs and basis[i] < basis[best]):
                    best = i
        if best is None:  # unbounded direction; cannot happen for phase one
            break
        r = best
        prow = tab[r]
        piv = prow[enter]
        for i in range(rows):
            f = tab[i][enter]
            if i != r and f:
                tab[i] = _reduce_row([piv * u - f * v for u, v in zip(tab[i], prow)])
        f = cost[enter]
        cost = _reduce_row([piv * u - f * v for u, v in zip(cost, prow)])
        basis[r] = enter
    if cost[-1] != 0:
        return None
    y = [Fraction(0)] * total
    for i, j in enumerate(basis):
        y[j] = Fraction(tab[i][-1], tab[i][j])
    if any(y[nvar + i] != 0 for i in range(rows)):
        return None
    return y[:nvar]


def dot(u: Iterable[Fraction], v: Iterable[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))
