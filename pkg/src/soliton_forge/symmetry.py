"""Exact verification machinery for the rational symmetric identity.

The identity evaluated here is the one the Abel sums rest on: for distinct
values x_1..x_{n+1},

    sum_k x_k^mu / prod_{j != k} (x_k - x_j)  =  0   (mu < n)
                                              =  1   (mu = n).

Everything is exact rational arithmetic; the floating-point variant that the
trajectory code needs lives in :mod:`soliton_forge.abel`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError


@dataclass(frozen=True)
class RationalVector:
    """Tuple of pairwise-distinct exact rationals."""

    entries: tuple[Fraction, ...]

    def __init__(self, entries: Sequence) -> None:
        entries = tuple(Fraction(e) for e in entries)
        if len(set(entries)) != len(entries):
            raise ValueError("entries must be pairwise distinct")
        if not entries:
            raise ValueError("at least one entry required")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def without(self, i: int) -> "RationalVector":
        return RationalVector(self.entries[:i] + self.entries[i + 1 :])


def vandermonde_product(xs: RationalVector | Sequence) -> Fraction:
    """Product of ``x_i - x_j`` over ordered pairs i < j (1 for a single entry).

    Accepts a plain sequence as well, in which case duplicates are allowed and
    produce an exact zero.
    """
    entries = xs.entries if isinstance(xs, RationalVector) else tuple(Fraction(e) for e in xs)
    out = Fraction(1)
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            out *= entries[i] - entries[j]
    return out


def vandermonde_cofactor_sum(xs: RationalVector, j: int) -> Fraction:
    """Alternating sum ``sum_i (-1)^(i+1) x_i^j P(xs without entry i)``.

    Vanishes identically for ``j < len(xs) - 1`` and reproduces the full
    Vandermonde product at ``j = len(xs) - 1``.
    """
    if j < 0:
        raise DomainError("exponent must be >= 0")
    out = Fraction(0)
    for i, x in enumerate(xs.entries):
        term = x**j * vandermonde_product(xs.without(i))
        out += term if i % 2 == 0 else -term
    return out


def symmetric_sum(xs: RationalVector, mu: int) -> Fraction:
    """``sum_k x_k^mu / prod_{j != k}(x_k - x_j)`` in exact arithmetic.

    Only claimed (and only allowed) for ``mu <= len(xs) - 1``; the value is 0
    below the top exponent and 1 at it.
    """
    n = len(xs) - 1
    if mu < 0 or mu > n:
        raise DomainError(f"exponent {mu} outside the claimed range 0..{n}")
    out = Fraction(0)
    for k, x in enumerate(xs.entries):
        denom = Fraction(1)
        for j, y in enumerate(xs.entries):
            if j != k:
                denom *= x - y
        out += x**mu / denom
    return out


def symmetric_sum_via_quotient(xs: RationalVector, mu: int) -> Fraction:
    """Independent route to the same sum: cofactor-sum over Vandermonde product."""
    n = len(xs) - 1
    if mu < 0 or mu > n:
        raise DomainError(f"exponent {mu} outside the claimed range 0..{n}")
    return vandermonde_cofactor_sum(xs, mu) / vandermonde_product(xs)
