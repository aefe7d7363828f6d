"""The KdV recursion tower: conserved densities, basic solitons, the squared
eigenfunction invariant, and the spectral-curve polynomial.

All objects are generated with every integration constant fixed to zero; the
variants with free constants are recovered through linear combinations
(:class:`SolitonCombination`), never stored state.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .diffpoly import DiffPoly, LambdaPoly, apply_B, formal_integral
from .errors import CheckFailed

_F_TABLE: dict[int, DiffPoly] = {-1: DiffPoly.constant(Fraction(1, 2))}
_F_LOCK = threading.Lock()


def conserved_density(n: int) -> DiffPoly:
    """n-th conserved density of the hierarchy (n >= -1), integration constants zero.

    Defined by the seed 1/2 at n = -1 and the recursion ``F_{n+1}' = B(F_n)``;
    each step is a formal integration.  Memoized behind a lock so concurrent
    readers never recompute.
    """
    if n < -1:
        raise ValueError("hierarchy index must be >= -1")
    with _F_LOCK:
        top = max(_F_TABLE)
        while top < n:
            _F_TABLE[top + 1] = formal_integral(apply_B(_F_TABLE[top]))
            top += 1
        return _F_TABLE[n]


def basic_soliton(n: int) -> LambdaPoly:
    """Degree-n basic soliton: coefficient of the i-th spectral power is 4^i F_{n-1-i}."""
    if n < 0:
        raise ValueError("soliton degree must be >= 0")
    return LambdaPoly(
        [Fraction(4) ** i * conserved_density(n - 1 - i) for i in range(n + 1)]
    )


def soliton_residual(phi: LambdaPoly) -> LambdaPoly:
    """``B(phi) - 4 λ phi'`` applied coefficient-wise.

    For the degree-n basic soliton the spectral powers telescope away and the
    residual collapses to the degree-0 polynomial ``B(F_{n-1})``.
    """
    return phi.map(apply_B) - 4 * phi.diff().shift(1)


def stationary_equation(n: int) -> DiffPoly:
    """Left side of the n-th stationary hierarchy equation: d/dx of F_n, expanded."""
    return conserved_density(n).diff()


@dataclass(frozen=True)
class HierarchyLevel:
    """One rung of the tower: the density F_n and the basic soliton of the same level."""

    n: int
    F: DiffPoly
    phi: LambdaPoly


def hierarchy_level(n: int) -> HierarchyLevel:
    return HierarchyLevel(n=n, F=conserved_density(n), phi=basic_soliton(n))


@dataclass(frozen=True)
class SolitonCombination:
    """Rational coefficients (alpha_n, ..., alpha_0) of a soliton linear combination."""

    alphas: tuple[Fraction, ...]

    def __init__(self, alphas):
        alphas = tuple(Fraction(a) for a in alphas)
        if not alphas or alphas[0] == 0:
            raise ValueError("leading combination coefficient must be nonzero")
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return len(self.alphas) - 1


def combination_constancy(c: SolitonCombination) -> DiffPoly:
    """``sum_j alpha_j F_j``: its x-derivative vanishing is the condition for the
    matching soliton combination to solve the squared-eigenfunction equation."""
    out = DiffPoly.zero()
    for i, a in enumerate(c.alphas):
        out = out + a * conserved_density(c.n - i)
    return out


def combination_soliton(c: SolitonCombination) -> LambdaPoly:
    """The combination ``sum_j alpha_j phi_j`` itself."""
    out = LambdaPoly.zero()
    for i, a in enumerate(c.alphas):
        out = out + a * basic_soliton(c.n - i)
    return out


def invariant_polynomial(n: int) -> LambdaPoly:
    """First integral of the squared-eigenfunction equation on the degree-n soliton.

    Computed from the closed form ``phi phi'' - (phi')^2 / 2 + 2 (q - λ) phi^2``
    (no integration), a polynomial of spectral degree ``2n + 1``.
    """
    phi = basic_soliton(n)
    q_minus_lam = LambdaPoly([DiffPoly.q(), DiffPoly.constant(-1)])
    return (
        phi * phi.diff(2)
        - Fraction(1, 2) * (phi.diff() * phi.diff())
        + 2 * (q_minus_lam * phi * phi)
    )


def curve_polynomial(n: int) -> LambdaPoly:
    """Monic spectral-curve polynomial of degree ``2n + 1``: the invariant
    polynomial rescaled by ``-2 / 4^(2n)``."""
    return invariant_polynomial(n) * Fraction(-2, 4 ** (2 * n))


@dataclass(frozen=True)
class InvariantStructureReport:
    """Per-coefficient outcome of :func:`verify_invariant_structure`."""

    n: int
    checked: tuple[str, ...]


def verify_invariant_structure(n: int, bound: int = 4) -> InvariantStructureReport:
    """Verify the exact coefficient structure of the invariant polynomial.

    In powers of four times the spectral parameter: coefficients ``n+1 .. 2n``
    vanish, the leading coefficient is -1/8, and the x-derivative of the m-th
    coefficient equals ``F_{n-m-1} F_n'`` for ``0 <= m <= n-1`` (``F_{-1} F_n'``
    at ``m = n``).  Differentiation removes the additive ambiguity that an
    indefinite integral would otherwise leave in the low coefficients.

    Raises :class:`CheckFailed` naming the first offending coefficient.
    """
    if n < 0:
        raise ValueError("level must be >= 0")
    if n > bound:
        raise ValueError(f"level {n} above configured bound {bound}")
    h = invariant_polynomial(n)
    fn_prime = conserved_density(n).diff()
    checked = []
    # coefficient of (4λ)^m is the λ^m coefficient divided by 4^m
    g = [h.coeff(m) * Fraction(1, 4**m) for m in range(2 * n + 2)]
    for m in range(n + 1, 2 * n + 1):
        if g[m]:
            raise CheckFailed(f"coefficient of power {m} should vanish: {g[m].to_text()}")
        checked.append(f"power {m} vanishes")
    if g[2 * n + 1] != DiffPoly.constant(Fraction(-1, 8)):
        raise CheckFailed(f"leading coefficient is {g[2 * n + 1].to_text()}, expected -1/8")
    checked.append("leading coefficient -1/8")
    for m in range(n):
        expected = conserved_density(n - m - 1) * fn_prime
        if g[m].diff() != expected:
            raise CheckFailed(
                f"d/dx of coefficient {m} is {g[m].diff().to_text()}, "
                f"expected {expected.to_text()}"
            )
        checked.append(f"d/dx of power {m} matches density product")
    if g[n].diff() != conserved_density(-1) * fn_prime:
        raise CheckFailed(f"d/dx of coefficient {n} mismatch: {g[n].diff().to_text()}")
    checked.append(f"d/dx of power {n} matches seed product")
    return InvariantStructureReport(n=n, checked=tuple(checked))
