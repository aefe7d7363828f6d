"""Holomorphic-differential sums and their accumulation along trajectories.

Evaluated on a moving auxiliary-spectrum configuration, the basis differential
of index mu contributes

    sum_k  -2 λ_k^(mu-1) / prod_{i != k} (λ_k - λ_i)

per unit x.  This is the regular algebraic form of the flow's square-root
differentials (the Dubrovin right sides cancel the singular factor), so the
accumulation below never quadratures near a branch point.  By the exact
symmetric identity the sum is identically 0 for mu < n and -2 for mu = n;
the accumulated components therefore linearize the flow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dubrovin import AuxiliaryTrajectory
from .errors import CollisionError
from .spectral import AuxiliaryPoint

_COLLISION_TOL = 1e-10


def _lam_values(points: Sequence) -> list:
    return [p.lam if isinstance(p, AuxiliaryPoint) else p for p in points]


def abel_sum(points: Sequence, mu: int):
    """Differential-basis sum of index ``mu`` (1-based, ``1 <= mu <= n``).

    Accepts auxiliary points or bare values; exact inputs (rationals) give an
    exact result.  Raises :class:`CollisionError` on coincident points.
    """
    lams = _lam_values(points)
    n = len(lams)
    if not 1 <= mu <= n:
        raise ValueError(f"index mu={mu} outside 1..{n}")
    total = 0
    for k, lam in enumerate(lams):
        denom = 1
        for i, other in enumerate(lams):
            if i == k:
                continue
            d = lam - other
            if abs(d) < _COLLISION_TOL:
                raise CollisionError(f"points {k} and {i} coincide at {lam}")
            denom = denom * d
        total = total + (-2) * lam ** (mu - 1) / denom
    return total


@dataclass(frozen=True)
class AbelAccumulator:
    """Accumulated map components at one position."""

    x: float
    components: tuple[float, ...]


@dataclass(frozen=True)
class AbelSeries:
    """Accumulated map components along a whole trajectory (base point: start)."""

    xs: np.ndarray
    values: np.ndarray  # shape (len(xs), n)

    def __iter__(self):
        for x, row in zip(self.xs, self.values):
            yield AbelAccumulator(x=float(x), components=tuple(float(v) for v in row))

    def component(self, mu: int) -> np.ndarray:
        return self.values[:, mu - 1]

    def slope(self, mu: int) -> float:
        """Least-squares slope of one component against x."""
        return float(np.polyfit(self.xs, self.component(mu), 1)[0])

    def drift(self, mu: int) -> float:
        """Peak-to-peak excursion of one component over the run."""
        comp = self.component(mu)
        return float(np.max(comp) - np.min(comp))


def accumulate_along(traj: AuxiliaryTrajectory) -> AbelSeries:
    """Trapezoid accumulation of every differential component along a trajectory.

    The integrand per component is :func:`abel_sum` at the sampled
    configuration, i.e. the flow's own right sides; the base point is the
    trajectory's initial configuration, so every component starts at zero.
    """
    n = traj.n
    rates = np.empty((len(traj.xs), n))
    for i in range(len(traj.xs)):
        lams = traj.lambdas[i]
        for mu in range(1, n + 1):
            rates[i, mu - 1] = abel_sum(lams, mu)
    values = np.zeros_like(rates)
    dx = np.diff(traj.xs)
    increments = 0.5 * (rates[1:] + rates[:-1]) * dx[:, None]
    values[1:] = np.cumsum(increments, axis=0)
    return AbelSeries(xs=traj.xs.copy(), values=values)
