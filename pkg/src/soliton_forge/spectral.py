"""Numeric spectral curves from field data and the auxiliary spectrum.

A genus-n curve is the monic degree-(2n+1) polynomial whose coefficients come
from evaluating :func:`soliton_forge.kdv_hierarchy.curve_polynomial` on a jet
of the field.  Its 2n+1 real branch points bound n compact ovals (gaps); the
auxiliary spectrum is the set of n roots of the degree-n basic soliton at the
same jet, one root per gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ComplexAuxSpectrum, DegenerateCurve
from .kdv_hierarchy import basic_soliton, curve_polynomial

_SEPARATION_TOL = 1e-8
_REAL_TOL = 1e-8


def _as_jet(jet) -> tuple[float, ...]:
    return tuple(float(v) for v in jet)


def _polish_roots(coeffs_desc: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    deriv = np.polyder(coeffs_desc)
    for _ in range(steps):
        val = np.polyval(coeffs_desc, roots)
        slope = np.polyval(deriv, roots)
        safe = np.abs(slope) > 1e-300
        roots = np.where(safe, roots - val / np.where(safe, slope, 1.0), roots)
    return roots


@dataclass(frozen=True)
class SpectralCurveNumeric:
    """Monic real hyperelliptic curve data: genus, coefficients, branch points.

    ``coeffs`` are ascending powers, length ``2n + 2`` with a unit leading
    entry; ``branch_points`` are the sorted real roots.
    """

    n: int
    coeffs: tuple[float, ...]
    branch_points: tuple[float, ...]

    @classmethod
    def from_branch_points(cls, points: Sequence[float]) -> "SpectralCurveNumeric":
        """Build the monic curve directly from its real branch points.

        Degenerate (repeated) branch points are allowed here: this is the
        entry path for synthetic experiments where no field data exists.
        """
        pts = tuple(sorted(float(p) for p in points))
        if len(pts) % 2 == 0:
            raise ValueError("a genus-n curve needs an odd number of branch points")
        coeffs_desc = np.poly(pts)
        return cls(
            n=(len(pts) - 1) // 2,
            coeffs=tuple(coeffs_desc[::-1]),
            branch_points=pts,
        )

    @classmethod
    def from_coeffs(cls, coeffs_ascending: Sequence[float]) -> "SpectralCurveNumeric":
        """Build from a monic coefficient vector; roots must be distinct reals."""
        coeffs = np.asarray(coeffs_ascending, dtype=float)
        if len(coeffs) % 2 != 0:
            raise ValueError("coefficient vector must have even length 2n + 2")
        if abs(coeffs[-1] - 1.0) > 1e-9:
            raise ValueError("curve polynomial must be monic")
        n = (len(coeffs) - 2) // 2
        desc = coeffs[::-1].copy()
        roots = np.roots(desc)
        scale = max(1.0, float(np.max(np.abs(roots)))) if len(roots) else 1.0
        if np.max(np.abs(roots.imag)) > _REAL_TOL * scale:
            raise DegenerateCurve(
                f"branch points are not all real: {np.sort_complex(roots)}"
            )
        real = _polish_roots(desc, np.sort(roots.real))
        real = np.sort(real)
        if np.min(np.diff(real)) < _SEPARATION_TOL * scale:
            raise DegenerateCurve(f"branch points cluster within tolerance: {real}")
        return cls(n=n, coeffs=tuple(coeffs), branch_points=tuple(real))

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.n + 2:
            raise ValueError("coefficient count inconsistent with genus")

    def gaps(self) -> list[tuple[float, float]]:
        """The n compact ovals: consecutive branch-point pairs from the bottom."""
        e = self.branch_points
        return [(e[2 * k], e[2 * k + 1]) for k in range(self.n)]

    def gap_of(self, lam: float, tol: float = 1e-9) -> int:
        """Index of the compact oval containing ``lam``; ValueError if none."""
        for k, (a, b) in enumerate(self.gaps()):
            if a - tol <= lam <= b + tol:
                return k
        raise ValueError(f"{lam} lies in no compact oval of the curve")

    def evaluate(self, x: float) -> float:
        """Horner evaluation of the monic curve polynomial."""
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def oval_weight(self, k: int, lam: float) -> float:
        """Positive factor W with ``P(λ) = (λ - a_k)(b_k - λ) W(λ)`` on oval k.

        Computed from the branch-point factorization, so it stays strictly
        positive on the closed oval and free of the square-root singularity.
        """
        e = self.branch_points
        out = -1.0
        for j, root in enumerate(e):
            if j == 2 * k or j == 2 * k + 1:
                continue
            out *= lam - root
        return out

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "coeffs": list(self.coeffs),
            "branch_points": list(self.branch_points),
        }


def curve_from_profile(n: int, jet) -> SpectralCurveNumeric:
    """Evaluate the genus-n curve coefficients on a field jet (q-convention).

    The jet must supply derivatives up to order 2n.  Roots are located by a
    companion-matrix eigensolve with Newton polish; a curve whose roots are
    not 2n+1 distinct reals raises :class:`DegenerateCurve`.
    """
    jet = _as_jet(jet)
    coeffs = [c.evaluate(jet) for c in curve_polynomial(n).coeffs]
    return SpectralCurveNumeric.from_coeffs(coeffs)


@dataclass(frozen=True)
class AuxiliaryPoint:
    """One auxiliary-spectrum point: position and square-root branch sign."""

    lam: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("branch sign must be +1 or -1")


def aux_spectrum(n: int, jet) -> list[AuxiliaryPoint]:
    """Roots of the degree-n basic soliton at the given jet, with branch signs.

    The sign of each point is read off the slope of the soliton polynomial at
    the root (the square root of the curve it sits on), positive at exact
    turning points.
    """
    jet = _as_jet(jet)
    if n == 0:
        return []
    phi = basic_soliton(n)
    coeffs = np.array([c.evaluate(jet) for c in phi.coeffs], dtype=float)
    desc = coeffs[::-1]
    roots = np.roots(desc)
    scale = max(1.0, float(np.max(np.abs(roots)))) if len(roots) else 1.0
    if len(roots) and np.max(np.abs(roots.imag)) > _REAL_TOL * scale:
        raise ComplexAuxSpectrum(f"nonreal auxiliary spectrum: {np.sort_complex(roots)}")
    real = np.sort(_polish_roots(desc, np.sort(roots.real)))
    slope_coeffs = [c.evaluate(jet) for c in phi.diff().coeffs]
    out = []
    for lam in real:
        slope = 0.0
        for c in reversed(slope_coeffs):
            slope = slope * lam + c
        out.append(AuxiliaryPoint(lam=float(lam), sign=1 if slope >= 0 else -1))
    return out


def curve_eval(curve: SpectralCurveNumeric, x: float) -> float:
    """Module-level Horner evaluation, mirroring :meth:`SpectralCurveNumeric.evaluate`."""
    return curve.evaluate(x)
