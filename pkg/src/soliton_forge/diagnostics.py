"""Finite-difference residual oracles for grid data.

These stencil-based checks are deliberately independent of the symbolic and
ODE machinery they judge: they see only sampled values.  All derivative
stencils are five-point centered.
"""

from __future__ import annotations

import numpy as np

from .kdv_hierarchy import conserved_density

_STENCILS = {
    1: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    2: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    3: np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0,
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}


def fd_derivative(values: np.ndarray, dx: float, order: int, periodic: bool) -> np.ndarray:
    """Five-point centered derivative of sampled values.

    Periodic data wraps; otherwise the two nodes at each end are trimmed, so
    the result is shorter by four samples.
    """
    if order not in _STENCILS:
        raise ValueError("five-point stencils cover orders 1..4")
    w = _STENCILS[order] / dx**order
    v = np.asarray(values, dtype=float)
    if periodic:
        out = np.zeros_like(v)
        for k, c in enumerate(w, start=-2):
            out += c * np.roll(v, -k)
        return out
    return np.convolve(v, w[::-1], mode="valid")


def fd_jet(values: np.ndarray, dx: float, orders: int, periodic: bool) -> list[np.ndarray]:
    """Jet ``[q, q', ..., q^(orders)]`` of grid data by five-point stencils."""
    v = np.asarray(values, dtype=float)
    jets = [v if periodic else v[2:-2]]
    for k in range(1, orders + 1):
        jets.append(fd_derivative(v, dx, k, periodic))
    return jets


def kdv_residual(
    q_levels: np.ndarray, dx: float, dt: float, periodic: bool = True
) -> float:
    """Sup-norm of ``q_t + 6 q q_x + q_xxx`` on an (nt, nx) stack of levels.

    Time derivative by centered differences between stored levels, space
    derivatives by five-point stencils; boundary-affected nodes are excluded
    for non-periodic data.
    """
    q = np.asarray(q_levels, dtype=float)
    if q.ndim != 2 or q.shape[0] < 3:
        raise ValueError("need at least three time levels")
    q_t = (q[2:] - q[:-2]) / (2.0 * dt)
    worst = 0.0
    for i in range(1, q.shape[0] - 1):
        row = q[i]
        qx = fd_derivative(row, dx, 1, periodic)
        qxxx = fd_derivative(row, dx, 3, periodic)
        if periodic:
            res = q_t[i - 1] + 6.0 * row * qx + qxxx
        else:
            res = q_t[i - 1][2:-2] + 6.0 * row[2:-2] * qx + qxxx
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def stationary_residual(
    q_values: np.ndarray,
    dx: float,
    n: int = 2,
    periodic: bool = False,
    first_order_coefficient: float = 0.0,
) -> tuple[float, float]:
    """Residual of the level-n stationary hierarchy equation on sampled q.

    The conserved density of level n (plus ``first_order_coefficient`` times
    the level-0 density, i.e. q itself) is evaluated pointwise on a five-point
    finite-difference jet, then differentiated once more by the same stencil;
    for n = 2 with zero admixture this reproduces the fifth-order stationary
    equation, and a nonzero admixture adds the first-order-flow term that a
    non-centered spectral curve forces (see :func:`combination_shift`).

    Returns ``(absolute, normalized)`` sup-norms, the latter scaled by the
    size of the equation's leading derivative term, which is what bounds the
    attainable cancellation of a stencil oracle in double precision.
    """
    jets = fd_jet(q_values, dx, 2 * n, periodic)
    width = min(len(j) for j in jets)
    jets = [j[:width] if periodic else j[(len(j) - width) // 2 : (len(j) - width) // 2 + width] for j in jets]
    f_n = conserved_density(n)
    density = np.empty(width)
    cols = np.column_stack(jets)
    for i in range(width):
        density[i] = f_n.evaluate(cols[i]) + first_order_coefficient * cols[i, 0]
    residual = fd_derivative(density, dx, 1, periodic)
    top = fd_derivative(jets[2 * n], dx, 1, periodic)
    if not periodic:
        margin = 2
        residual = residual[margin:-margin] if len(residual) > 2 * margin else residual
        top = top[margin:-margin] if len(top) > 2 * margin else top
    absolute = float(np.max(np.abs(residual)))
    scale = max(1.0, float(np.max(np.abs(top))))
    return absolute, absolute / scale


def combination_shift(curve) -> float:
    """First-order-flow admixture a genus-2 curve forces on its solutions.

    A real monic quintic can never zero both coefficients of its vanishing
    window (that would force the sums of branch points and of their squares
    to vanish simultaneously), so a real genus-2 curve always describes a
    combination of the level-2 soliton with a multiple of the constant one.
    The exact consequence, provable from the flow plus root/coefficient
    matching, is that the reconstructed field satisfies

        d/dx [ F_2 + 8 c_3 q ] = 0,

    with c_3 the cubic coefficient of the curve.  This returns ``8 c_3``
    (zero for higher-genus input is not claimed; only n = 2 is covered).
    """
    if curve.n != 2:
        raise ValueError("combination shift is derived for genus 2 only")
    return 8.0 * curve.coeffs[3]


def curve_coefficient_drift(
    q_values: np.ndarray, dx: float, n: int, periodic: bool = True
) -> float:
    """Isospectrality diagnostic: recompute the genus-n curve coefficients from
    grid data via finite-difference jets and report their worst x-variation."""
    from .kdv_hierarchy import curve_polynomial

    jets = fd_jet(q_values, dx, 2 * n, periodic)
    width = min(len(j) for j in jets)
    jets = [j[:width] for j in jets]
    cols = np.column_stack(jets)
    worst = 0.0
    for coeff in curve_polynomial(n).coeffs[:-1]:
        vals = np.array([coeff.evaluate(cols[i]) for i in range(width)])
        worst = max(worst, float(np.max(vals) - np.min(vals)))
    return worst
