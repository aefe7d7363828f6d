"""Auxiliary-spectrum flows: the coupled ODE system in x, the advective flow
in t, and field reconstruction.

The x-flow integrated here is, per oval-confined point k with branch sign s_k,

    dλ_k/dx = -2 s_k sqrt(P(λ_k)) / prod_{i != k} (λ_k - λ_i).

Direct integration of this form is hostile near branch points (square-root
turning, sign flip, non-Lipschitz right side).  Internally each point is
therefore parametrized on its oval [a, b] as ``λ = m - r cos θ`` with
m = (a+b)/2, r = (b-a)/2, under which the same flow becomes

    dθ_k/dx = -2 sqrt(W_k(λ_k)) / prod_{i != k} (λ_k - λ_i),

with ``W_k = P / ((λ - a)(b - λ))`` strictly positive on the closed oval.  The
angle equation is smooth through the turning points; the branch sign is
recovered as the sign of sin θ_k and flips exactly when θ_k crosses a multiple
of π, which is the event recorded as a branch-point touch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CFLViolation, CollisionError, StepFailure
from .spectral import AuxiliaryPoint, SpectralCurveNumeric

_COLLISION_TOL = 1e-10
_DEGENERATE_GAP = 1e-12


@dataclass(frozen=True)
class AuxiliaryTrajectory:
    """Sampled auxiliary-spectrum paths with square-root branch signs."""

    xs: np.ndarray
    lambdas: np.ndarray  # shape (len(xs), n)
    signs: np.ndarray  # same shape, entries +1 / -1
    curve: SpectralCurveNumeric
    branch_touches: tuple[tuple[float, int], ...] = ()

    @property
    def n(self) -> int:
        return self.lambdas.shape[1]

    def points(self, i: int) -> list[AuxiliaryPoint]:
        return [
            AuxiliaryPoint(lam=float(l), sign=int(s))
            for l, s in zip(self.lambdas[i], self.signs[i])
        ]

    def final_points(self) -> list[AuxiliaryPoint]:
        return self.points(len(self.xs) - 1)


@dataclass
class FieldGrid:
    """Reconstructed field samples; optionally a stack of time levels."""

    xs: np.ndarray
    q: np.ndarray
    lambdas: np.ndarray
    curve: SpectralCurveNumeric | None = None
    periodic: bool = False
    levels: list["TimeLevel"] = field(default_factory=list)


@dataclass(frozen=True)
class TimeLevel:
    t: float
    lambdas: np.ndarray
    q: np.ndarray


def dubrovin_rhs(
    curve: SpectralCurveNumeric, lams: Sequence[float], signs: Sequence[int]
) -> np.ndarray:
    """Right side of the λ-form flow at one configuration (diagnostic use)."""
    lams = np.asarray(lams, dtype=float)
    out = np.empty_like(lams)
    for k, lam in enumerate(lams):
        p_val = max(curve.evaluate(lam), 0.0)
        denom = 1.0
        for i, other in enumerate(lams):
            if i != k:
                denom *= lam - other
        out[k] = -2.0 * signs[k] * math.sqrt(p_val) / denom
    return out


def _gap_assignment(curve: SpectralCurveNumeric, start: Sequence[AuxiliaryPoint]):
    gaps = curve.gaps()
    if len(start) != curve.n:
        raise ValueError(f"need {curve.n} start points, got {len(start)}")
    lams = [pt.lam for pt in start]
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            if abs(lams[i] - lams[j]) < _COLLISION_TOL:
                raise CollisionError(f"start points {i} and {j} coincide")
    taken: dict[int, AuxiliaryPoint] = {}
    for pt in start:
        k = curve.gap_of(pt.lam)
        if k in taken:
            raise ValueError(f"two start points in oval {k}")
        taken[k] = pt
    ordered = [taken[k] for k in range(curve.n)]
    return gaps, ordered


def x_flow(
    curve: SpectralCurveNumeric,
    start: Sequence[AuxiliaryPoint],
    x_range: tuple[float, float],
    tol: float = 1e-10,
    samples: int = 801,
    max_step: float | None = None,
) -> AuxiliaryTrajectory:
    """Integrate the auxiliary-spectrum flow over ``x_range``.

    ``start`` supplies one on-oval point per compact gap (any order); the
    trajectory is sampled on ``samples`` uniform nodes including both ends.
    Branch-point touches flip the stored sign and are recorded.  A decreasing
    ``x_range`` integrates backwards.

    Raises :class:`CollisionError` when two points approach within 1e-10 and
    :class:`StepFailure` when the adaptive integrator gives up.
    """
    gaps, ordered = _gap_assignment(curve, start)
    mids = np.array([(a + b) / 2 for a, b in gaps])
    rads = np.array([(b - a) / 2 for a, b in gaps])
    scale = max(1.0, float(np.max(np.abs(curve.branch_points))))
    frozen = rads < _DEGENERATE_GAP * scale

    theta0 = np.zeros(curve.n)
    for k, pt in enumerate(ordered):
        if frozen[k]:
            continue
        cosv = (mids[k] - pt.lam) / rads[k]
        base = math.acos(min(1.0, max(-1.0, cosv)))
        theta0[k] = base if pt.sign >= 0 else -base

    def rhs(_x, theta):
        lams = mids - rads * np.cos(theta)
        out = np.zeros_like(theta)
        for k in range(curve.n):
            if frozen[k]:
                continue
            denom = 1.0
            for i in range(curve.n):
                if i != k:
                    denom *= lams[k] - lams[i]
            w = max(curve.oval_weight(k, lams[k]), 0.0)
            out[k] = -2.0 * math.sqrt(w) / denom
        return out

    events = []
    for k in range(curve.n):
        if frozen[k]:
            continue

        def touch(_x, theta, k=k):
            return math.sin(theta[k])

        touch.terminal = False
        events.append((k, touch))

    x0, x1 = float(x_range[0]), float(x_range[1])
    xs = np.linspace(x0, x1, samples)
    span = abs(x1 - x0)
    if max_step is None:
        max_step = max(span / 50.0, 1e-12)
    sol = solve_ivp(
        rhs,
        (x0, x1),
        theta0,
        method="DOP853",
        t_eval=xs,
        rtol=tol,
        atol=tol * 1e-2,
        max_step=max_step,
        events=[ev for _, ev in events],
        dense_output=False,
    )
    if not sol.success:
        raise StepFailure(f"x-flow integration failed: {sol.message}")
    thetas = sol.y.T
    lambdas = mids - rads * np.cos(thetas)
    sines = np.sin(thetas)
    signs = np.where(sines >= 0.0, 1, -1)
    for k in range(curve.n):
        if frozen[k]:
            signs[:, k] = ordered[k].sign

    touches = []
    for (k, _), t_ev in zip(events, sol.t_events):
        touches.extend((float(xe), k) for xe in t_ev)
    touches.sort(key=lambda it: it[0], reverse=x1 < x0)

    if curve.n > 1:
        diffs = [
            np.min(np.abs(lambdas[:, i] - lambdas[:, j]))
            for i in range(curve.n)
            for j in range(i + 1, curve.n)
        ]
        if min(diffs) < _COLLISION_TOL:
            raise CollisionError("auxiliary points collided along the flow")
    return AuxiliaryTrajectory(
        xs=xs,
        lambdas=lambdas,
        signs=signs.astype(int),
        curve=curve,
        branch_touches=tuple(touches),
    )


def reconstruct_q(traj: AuxiliaryTrajectory) -> FieldGrid:
    """Field reconstruction ``q = -2 sum_k λ_k`` at every sample."""
    q = -2.0 * np.sum(traj.lambdas, axis=1)
    return FieldGrid(
        xs=traj.xs.copy(),
        q=q,
        lambdas=traj.lambdas.copy(),
        curve=traj.curve,
    )


def _upwind_derivative(values: np.ndarray, speed: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    """First-order one-sided x-derivative, side chosen by the advection speed."""
    if periodic:
        backward = (values - np.roll(values, 1)) / dx
        forward = (np.roll(values, -1) - values) / dx
    else:
        backward = np.empty_like(values)
        backward[1:] = (values[1:] - values[:-1]) / dx
        backward[0] = (values[1] - values[0]) / dx
        forward = np.empty_like(values)
        forward[:-1] = (values[1:] - values[:-1]) / dx
        forward[-1] = (values[-1] - values[-2]) / dx
    return np.where(speed > 0.0, backward, forward)


def t_flow(
    field: FieldGrid,
    t_range: tuple[float, float],
    cfl: float,
    stored_levels: int = 33,
) -> FieldGrid:
    """Advect every auxiliary path by its local speed ``2 (q + 2 λ_k)``.

    Method of lines: first-order upwind in x (side chosen by the speed sign),
    explicit two-stage Runge-Kutta in t, time step ``cfl Δx / max|speed|``
    recomputed each step; the field is re-derived from the λ sum inside every
    stage.  Returns a new grid whose ``levels`` hold ``stored_levels`` evenly
    spaced snapshots including both ends.
    """
    if not 0.0 < cfl <= 1.0:
        raise CFLViolation(f"cfl must lie in (0, 1], got {cfl}")
    if field.lambdas is None or field.lambdas.ndim != 2:
        raise ValueError("field must carry per-level trajectories")
    xs = field.xs
    dx = float(xs[1] - xs[0])
    if not np.allclose(np.diff(xs), dx, rtol=1e-8):
        raise ValueError("t-flow requires a uniform grid")

    def rate(lams: np.ndarray) -> np.ndarray:
        q = -2.0 * np.sum(lams, axis=1)
        out = np.empty_like(lams)
        for k in range(lams.shape[1]):
            speed = 2.0 * (q + 2.0 * lams[:, k])
            dlam = _upwind_derivative(lams[:, k], speed, dx, field.periodic)
            out[:, k] = -speed * dlam
        return out

    t0, t1 = float(t_range[0]), float(t_range[1])
    if t1 <= t0:
        raise ValueError("t range must be increasing")
    lams = field.lambdas.copy()
    store_at = np.linspace(t0, t1, stored_levels)
    levels: list[TimeLevel] = []
    next_store = 0

    t = t0
    while True:
        while next_store < len(store_at) and t >= store_at[next_store] - 1e-14:
            levels.append(
                TimeLevel(t=t, lambdas=lams.copy(), q=-2.0 * np.sum(lams, axis=1))
            )
            next_store += 1
        if t >= t1 - 1e-14:
            break
        q = -2.0 * np.sum(lams, axis=1)
        max_speed = max(float(np.max(np.abs(2.0 * (q[:, None] + 2.0 * lams)))), 1e-12)
        dt = min(cfl * dx / max_speed, t1 - t)
        if next_store < len(store_at):
            dt = min(dt, max(store_at[next_store] - t, 1e-14))
        k1 = rate(lams)
        k2 = rate(lams + dt * k1)
        lams = lams + 0.5 * dt * (k1 + k2)
        t += dt

    return FieldGrid(
        xs=xs.copy(),
        q=levels[-1].q.copy(),
        lambdas=lams,
        curve=field.curve,
        periodic=field.periodic,
        levels=levels,
    )


def linearized_residual(
    phi_grid: np.ndarray,
    q_grid: np.ndarray,
    dx: float,
    dt: float,
    periodic: bool = True,
) -> float:
    """Sup-norm residual of the linearized evolution ``φ_t + φ''' + 6 q φ' = 0``.

    Centered differences in t and x on an (nt, nx) grid; diagnostic only.
    """
    phi = np.asarray(phi_grid, dtype=float)
    q = np.asarray(q_grid, dtype=float)
    if phi.shape != q.shape or phi.ndim != 2 or phi.shape[0] < 3:
        raise ValueError("need matching (nt >= 3, nx) grids")
    phi_t = (phi[2:] - phi[:-2]) / (2.0 * dt)
    mid = phi[1:-1]
    q_mid = q[1:-1]

    def dshift(arr, k):
        return np.roll(arr, -k, axis=1)

    if periodic:
        phi_x = (dshift(mid, 1) - dshift(mid, -1)) / (2.0 * dx)
        phi_xxx = (
            dshift(mid, 2) - 2.0 * dshift(mid, 1) + 2.0 * dshift(mid, -1) - dshift(mid, -2)
        ) / (2.0 * dx**3)
        res = phi_t + phi_xxx + 6.0 * q_mid * phi_x
        return float(np.max(np.abs(res)))
    phi_x = (mid[:, 2:] - mid[:, :-2]) / (2.0 * dx)
    phi_xxx = (mid[:, 4:] - 2.0 * mid[:, 3:-1] + 2.0 * mid[:, 1:-3] - mid[:, :-4]) / (
        2.0 * dx**3
    )
    res = phi_t[:, 2:-2] + phi_xxx + 6.0 * q_mid[:, 2:-2] * phi_x[:, 1:-1]
    return float(np.max(np.abs(res)))
