"""Reference exact solutions: complete elliptic integral, Jacobi functions via
the arithmetic-geometric mean, and the cnoidal / sech^2 travelling profiles
with closed-form derivatives.

These profiles are the oracles the trajectory solver is validated against, so
every derivative here is analytic (chain rules on sn/cn/dn), never a finite
difference.  The cnoidal formulas are produced in the u-convention of the
travelling-wave reduction; the solver-side field is q = -u and the conversion
happens explicitly at module boundaries (:func:`kdv_field`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

_AGM_TOL = 1e-15


def _agm(a: float, b: float) -> float:
    while abs(a - b) > _AGM_TOL * abs(a):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter convention:
    ``K(m) = ∫_0^{π/2} dθ / sqrt(1 - m sin^2 θ)``, via the AGM."""
    if not 0.0 <= m < 1.0:
        raise DomainError(f"parameter m={m} outside [0, 1)")
    return math.pi / (2.0 * _agm(1.0, math.sqrt(1.0 - m)))


def jacobi_sn_cn_dn(u: float, m: float) -> tuple[float, float, float]:
    """Jacobi sn, cn, dn by the descending Landen (AGM) recursion.

    Handles the degenerate parameters exactly: circular functions at m = 0 and
    hyperbolic ones at m = 1.
    """
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"parameter m={m} outside [0, 1]")
    if m == 0.0:
        return math.sin(u), math.cos(u), 1.0
    if m == 1.0:
        t, s = math.tanh(u), 1.0 / math.cosh(u)
        return t, s, s
    a, b, c = [1.0], [math.sqrt(1.0 - m)], [math.sqrt(m)]
    while abs(c[-1]) > _AGM_TOL:
        an = 0.5 * (a[-1] + b[-1])
        bn = math.sqrt(a[-1] * b[-1])
        cn_ = 0.5 * (a[-1] - b[-1])
        a.append(an)
        b.append(bn)
        c.append(cn_)
    n = len(a) - 1
    phi = [0.0] * (n + 1)
    phi[n] = 2.0**n * a[n] * u
    for i in range(n, 0, -1):
        arg = max(-1.0, min(1.0, c[i] / a[i] * math.sin(phi[i])))
        phi[i - 1] = 0.5 * (phi[i] + math.asin(arg))
    sn = math.sin(phi[0])
    cn = math.cos(phi[0])
    dn = cn / math.cos(phi[1] - phi[0]) if n >= 1 else math.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi_cn(u: float, m: float) -> float:
    """Jacobi cn(u | m)."""
    return jacobi_sn_cn_dn(u, m)[1]


@dataclass(frozen=True)
class ProfileJet:
    """Value and the first four x-derivatives of a field at one point."""

    values: tuple[float, float, float, float, float]

    def __post_init__(self):
        if len(self.values) != 5 or not all(math.isfinite(v) for v in self.values):
            raise ValueError("jet needs five finite entries")

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def __neg__(self) -> "ProfileJet":
        return ProfileJet(tuple(-v for v in self.values))


def kdv_field(u_jet: ProfileJet) -> ProfileJet:
    """Convert a travelling-wave u-jet to the solver convention q = -u."""
    return -u_jet


@dataclass(frozen=True)
class CnoidalParams:
    """Ordered roots of the travelling-wave cubic plus a phase shift.

    The wave oscillates between the lower two roots; the elliptic parameter is
    ``m = (f2 - f3) / (f1 - f3)``.  The propagation speed is pinned by the
    root/coefficient relation of the monic cubic ``(f - f1)(f - f2)(f - f3)``
    whose doubled value equals the squared slope: ``c = -2 (f1 + f2 + f3)``.
    A pre-computed speed may be supplied for validation; a mismatch rejects.
    """

    f1: float
    f2: float
    f3: float
    x0: float = 0.0
    c: float = field(default=math.nan)

    def __post_init__(self):
        if not self.f3 < self.f2 < self.f1:
            raise ValueError("roots must satisfy f3 < f2 < f1")
        speed = -2.0 * (self.f1 + self.f2 + self.f3)
        if math.isnan(self.c):
            object.__setattr__(self, "c", speed)
        elif not math.isclose(self.c, speed, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError(f"speed {self.c} inconsistent with roots (expect {speed})")

    @property
    def m(self) -> float:
        return (self.f2 - self.f3) / (self.f1 - self.f3)

    @property
    def quadrature_coefficients(self) -> tuple[float, float]:
        """(A, B) of the phase-space relation ``(f')^2 / 2 = f^3 + c f^2 / 2 + A f + B``."""
        a = self.f1 * self.f2 + self.f1 * self.f3 + self.f2 * self.f3
        b = -self.f1 * self.f2 * self.f3
        return a, b


def cnoidal_profile(p: CnoidalParams, x: float) -> ProfileJet:
    """Travelling cnoidal profile ``u = f2 - (f2 - f3) cn^2(α (x - x0) | m)``
    with α = sqrt((f1 - f3) / 2), and its first four derivatives.

    The returned jet is in the u-convention; negate (:func:`kdv_field`) for
    the KdV field q.
    """
    alpha = math.sqrt((p.f1 - p.f3) / 2.0)
    m = p.m
    delta = p.f2 - p.f3
    s, c, d = jacobi_sn_cn_dn(alpha * (x - p.x0), m)
    u0 = p.f2 - delta * c * c
    scd = s * c * d
    u1 = 2.0 * delta * alpha * scd
    g = c * c * d * d - s * s * d * d - m * s * s * c * c  # (scd)' in the scaled variable
    u2 = 2.0 * delta * alpha**2 * g
    h = d * d + m * c * c - m * s * s
    u3 = -8.0 * delta * alpha**3 * scd * h
    u4 = -8.0 * delta * alpha**4 * (g * h - 6.0 * m * scd * scd)
    return ProfileJet((u0, u1, u2, u3, u4))


def sech_soliton(c: float, x0: float, x: float) -> ProfileJet:
    """Solitary-wave KdV field ``q = (c/2) sech^2(sqrt(c) (x - x0) / 2)`` and
    derivatives (q-convention jet)."""
    if c <= 0:
        raise DomainError("wave speed must be positive")
    beta = math.sqrt(c) / 2.0
    w = beta * (x - x0)
    s = 1.0 / math.cosh(w)
    t = math.tanh(w)
    s2 = s * s
    q0 = 0.5 * c * s2
    q1 = -c * beta * s2 * t
    q2 = -c * beta**2 * s2 * (s2 - 2.0 * t * t)
    q3 = 4.0 * c * beta**3 * s2 * t * (2.0 * s2 - t * t)
    q4 = 4.0 * c * beta**4 * s2 * (2.0 * s2 * s2 - 11.0 * s2 * t * t + 2.0 * t**4)
    return ProfileJet((q0, q1, q2, q3, q4))


def period(p: CnoidalParams) -> float:
    """Spatial period of the cnoidal profile: ``2 K(m) sqrt(2 / (f1 - f3))``."""
    return 2.0 * complete_K(p.m) * math.sqrt(2.0 / (p.f1 - p.f3))
