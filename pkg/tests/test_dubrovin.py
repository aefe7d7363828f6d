"""Trajectory integration, reconstruction, and the advective time flow.

The genus-1 runs are judged against the closed-form cnoidal solution; the
genus-2 runs against finite-difference residuals of the stationary hierarchy
equation that the curve itself dictates.
"""

import numpy as np
import pytest

from soliton_forge import diagnostics
from soliton_forge.dubrovin import (
    FieldGrid,
    dubrovin_rhs,
    linearized_residual,
    reconstruct_q,
    t_flow,
    x_flow,
)
from soliton_forge.elliptic import CnoidalParams, cnoidal_profile, kdv_field, period
from soliton_forge.errors import CFLViolation, CollisionError
from soliton_forge.spectral import (
    AuxiliaryPoint,
    SpectralCurveNumeric,
    aux_spectrum,
    curve_from_profile,
)

CNOIDAL = CnoidalParams(1.0, 0.0, -1.0)
PERIOD = period(CNOIDAL)


def cnoidal_jet(x: float):
    return kdv_field(cnoidal_profile(CNOIDAL, x))


@pytest.fixture(scope="module")
def genus1_trajectory():
    x_start = 0.37 * PERIOD
    jet = cnoidal_jet(x_start)
    curve = curve_from_profile(1, jet)
    start = aux_spectrum(1, jet)
    traj = x_flow(curve, start, (x_start, x_start + 2 * PERIOD), tol=1e-11, samples=1201)
    return curve, start, traj


@pytest.fixture(scope="module")
def genus2_trajectory():
    curve = SpectralCurveNumeric.from_branch_points([-2.0, -1.0, 0.0, 1.0, 2.0])
    start = [AuxiliaryPoint(-1.5, 1), AuxiliaryPoint(0.5, 1)]
    traj = x_flow(curve, start, (0.0, 5.0), tol=1e-13, samples=2001, max_step=0.01)
    return curve, start, traj


@pytest.fixture(scope="module")
def dense_run(genus2_trajectory):
    curve, start, _ = genus2_trajectory
    traj = x_flow(curve, start, (0.0, 2.0), tol=1e-13, samples=4001, max_step=0.01)
    h = float(traj.xs[1] - traj.xs[0])
    dlam = np.column_stack(
        [diagnostics.fd_derivative(traj.lambdas[:, k], h, 1, periodic=False)
         for k in range(2)]
    )
    inner = slice(2, -2)
    lams, signs = traj.lambdas[inner], traj.signs[inner]
    p_vals = np.array([[max(curve.evaluate(v), 0.0) for v in row] for row in lams])
    mask = (p_vals > 1e-2).all(axis=1)
    return lams[mask], dlam[mask] / (signs[mask] * np.sqrt(p_vals[mask]))


class TestGenusOneFlow:
    def test_roundtrip_against_cnoidal(self, genus1_trajectory):
        _, _, traj = genus1_trajectory
        rec = reconstruct_q(traj)
        exact = np.array([cnoidal_jet(x)[0] for x in traj.xs])
        assert np.max(np.abs(rec.q - exact)) < 1e-6

    def test_branch_touches_recorded(self, genus1_trajectory):
        _, _, traj = genus1_trajectory
        # two touches per spatial period, two periods integrated
        assert len(traj.branch_touches) == 4
        curve = traj.curve
        for x_touch, k in traj.branch_touches:
            lam_vals = np.interp(x_touch, traj.xs, traj.lambdas[:, k])
            assert min(abs(lam_vals - e) for e in curve.branch_points) < 1e-5

    def test_sign_flips_at_touches(self, genus1_trajectory):
        _, _, traj = genus1_trajectory
        flips = np.nonzero(np.diff(traj.signs[:, 0]))[0]
        assert len(flips) == len(traj.branch_touches)

    def test_gap_confinement(self, genus1_trajectory):
        curve, _, traj = genus1_trajectory
        a, b = curve.gaps()[0]
        assert traj.lambdas.min() >= a - 1e-9
        assert traj.lambdas.max() <= b + 1e-9
        assert all(curve.evaluate(l) >= -1e-9 for l in traj.lambdas[:, 0])

    def test_reversibility(self, genus1_trajectory):
        curve, start, traj = genus1_trajectory
        back = x_flow(
            curve, traj.final_points(), (traj.xs[-1], traj.xs[0]), tol=1e-11, samples=301
        )
        assert abs(back.lambdas[-1][0] - start[0].lam) < 1e-10
        assert back.signs[-1][0] == start[0].sign

    def test_flow_matches_separable_form(self, genus1_trajectory):
        # the scalar flow law: lam' / sqrt(P(lam)) = -2 on the tracked branch
        curve, start, _ = genus1_trajectory
        traj = x_flow(curve, start, (0.0, PERIOD), tol=1e-13, samples=4001,
                      max_step=0.01)
        xs, lams, signs = traj.xs, traj.lambdas[:, 0], traj.signs[:, 0]
        h = float(xs[1] - xs[0])
        dlam = diagnostics.fd_derivative(lams, h, 1, periodic=False)
        inner = slice(2, -2)
        p_vals = np.array([max(curve.evaluate(l), 0.0) for l in lams[inner]])
        mask = p_vals > 1e-3  # stay away from turning points for the FD slope
        ratio = dlam[mask] / (signs[inner][mask] * np.sqrt(p_vals[mask]))
        assert np.max(np.abs(ratio + 2.0)) < 1e-6

    def test_stationary_on_degenerate_gap(self):
        curve = SpectralCurveNumeric.from_branch_points([0.0, 0.0, 1.0])
        traj = x_flow(curve, [AuxiliaryPoint(0.0, 1)], (0.0, 3.0), samples=50)
        assert np.max(np.abs(traj.lambdas)) < 1e-14


class TestGenusTwoFlow:
    def test_gap_confinement(self, genus2_trajectory):
        curve, _, traj = genus2_trajectory
        for k, (a, b) in enumerate(curve.gaps()):
            assert traj.lambdas[:, k].min() >= a - 1e-9
            assert traj.lambdas[:, k].max() <= b + 1e-9

    def test_sum_rule_along_flow(self, dense_run):
        # the two flow laws combine to sum_k lam_k' / (s_k sqrt(P)) = 0
        _, terms = dense_run
        assert np.max(np.abs(terms.sum(axis=1))) < 1e-8

    def test_weighted_sum_rule(self, dense_run):
        # weighting by the positions gives the constant drive -2
        lams, terms = dense_run
        assert np.max(np.abs((lams * terms).sum(axis=1) + 2.0)) < 1e-8

    def test_exact_rhs_sum_rules(self, genus2_trajectory):
        # same two rules evaluated through the flow's own right sides
        curve, _, traj = genus2_trajectory
        for i in range(0, len(traj.xs), 100):
            lams, signs = traj.lambdas[i], traj.signs[i]
            rhs = dubrovin_rhs(curve, lams, signs)
            p_vals = np.array([max(curve.evaluate(v), 1e-300) for v in lams])
            ratios = rhs / (signs * np.sqrt(p_vals))
            assert abs(ratios.sum()) < 1e-9
            assert abs((lams * ratios).sum() + 2.0) < 1e-9

    def test_reconstruction_solves_curve_dictated_equation(self, genus2_trajectory):
        curve, _, traj = genus2_trajectory
        rec = reconstruct_q(traj)
        dx = float(traj.xs[1] - traj.xs[0])
        kappa = diagnostics.combination_shift(curve)
        absolute, normalized = diagnostics.stationary_residual(
            rec.q, dx, n=2, periodic=False, first_order_coefficient=kappa
        )
        assert normalized < 1e-4

    def test_product_relation_carries_curve_shift(self, genus2_trajectory):
        # q'' + 3 q^2 - 8 lam1 lam2 equals minus half the combination shift
        curve, _, traj = genus2_trajectory
        rec = reconstruct_q(traj)
        dx = float(traj.xs[1] - traj.xs[0])
        jets = diagnostics.fd_jet(rec.q, dx, 2, periodic=False)
        lam1 = traj.lambdas[2:-2, 0]
        lam2 = traj.lambdas[2:-2, 1]
        relation = jets[2] + 3 * jets[0] ** 2 - 8 * lam1 * lam2
        expected = -0.5 * diagnostics.combination_shift(curve)
        assert np.max(np.abs(relation - expected)) < 1e-6

    def test_collision_raises(self):
        curve = SpectralCurveNumeric.from_branch_points([-2.0, -1.0, 0.0, 1.0, 2.0])
        start = [AuxiliaryPoint(-1.0, 1), AuxiliaryPoint(-1.0 + 5e-11, 1)]
        with pytest.raises(CollisionError):
            x_flow(curve, start, (0.0, 1.0), samples=50)

    def test_start_points_must_cover_gaps(self, genus2_trajectory):
        curve, _, _ = genus2_trajectory
        with pytest.raises(ValueError):
            x_flow(curve, [AuxiliaryPoint(-1.5, 1), AuxiliaryPoint(-1.2, 1)], (0, 1))


class TestGenusThreeFlow:
    """Three ovals: the machinery is generic in the gap count."""

    def test_linearization_confinement_reversibility(self):
        from soliton_forge.abel import accumulate_along

        curve = SpectralCurveNumeric.from_branch_points(
            [-3.0, -2.2, -1.0, -0.3, 0.8, 1.5, 2.6]
        )
        start = [
            AuxiliaryPoint(-2.6, 1),
            AuxiliaryPoint(-0.6, -1),
            AuxiliaryPoint(1.2, 1),
        ]
        traj = x_flow(curve, start, (0.0, 3.0), tol=1e-12, samples=1201, max_step=0.01)
        series = accumulate_along(traj)
        assert series.drift(1) < 1e-12
        assert series.drift(2) < 1e-12
        assert abs(series.slope(3) + 2.0) < 1e-12
        for k, (a, b) in enumerate(curve.gaps()):
            assert traj.lambdas[:, k].min() >= a - 1e-9
            assert traj.lambdas[:, k].max() <= b + 1e-9
        back = x_flow(
            curve, traj.final_points(), (3.0, 0.0), tol=1e-12, samples=301, max_step=0.01
        )
        assert np.max(np.abs(back.lambdas[-1] - traj.lambdas[0])) < 1e-10


class TestReconstruction:
    def test_field_is_minus_twice_trace(self, genus2_trajectory):
        _, _, traj = genus2_trajectory
        rec = reconstruct_q(traj)
        assert np.allclose(rec.q, -2.0 * traj.lambdas.sum(axis=1))


@pytest.fixture(scope="module")
def stationary_field():
    xs = np.linspace(0.0, PERIOD, 512, endpoint=False)
    q0 = np.array([cnoidal_jet(x)[0] for x in xs])
    return FieldGrid(
        xs=xs, q=q0, lambdas=(-0.5 * q0)[:, None], curve=None, periodic=True
    )


class TestTimeFlow:
    def test_uniform_state_is_static(self):
        xs = np.linspace(0.0, 1.0, 64, endpoint=False)
        lam = np.full((64, 1), -0.35)
        field = FieldGrid(xs=xs, q=0.7 * np.ones(64), lambdas=lam, periodic=True)
        evolved = t_flow(field, (0.0, 0.05), cfl=0.5, stored_levels=5)
        assert np.max(np.abs(evolved.lambdas - lam)) == 0.0

    def test_cnoidal_state_is_time_invariant(self, stationary_field):
        evolved = t_flow(stationary_field, (0.0, 0.05), cfl=0.5, stored_levels=9)
        assert np.max(np.abs(evolved.q - stationary_field.q)) < 1e-13

    def test_cfl_validation(self, stationary_field):
        with pytest.raises(CFLViolation):
            t_flow(stationary_field, (0.0, 0.1), cfl=1.5)
        with pytest.raises(CFLViolation):
            t_flow(stationary_field, (0.0, 0.1), cfl=0.0)

    def test_moving_state_advects_and_stays_confined(self, genus2_trajectory):
        curve, _, traj = genus2_trajectory
        # resample the quasi-periodic trajectory onto a uniform grid window
        xs = traj.xs[:1001]
        field = FieldGrid(
            xs=xs,
            q=-2.0 * traj.lambdas[:1001].sum(axis=1),
            lambdas=traj.lambdas[:1001].copy(),
            curve=curve,
            periodic=False,
        )
        evolved = t_flow(field, (0.0, 0.01), cfl=0.4, stored_levels=5)
        assert np.max(np.abs(evolved.lambdas - field.lambdas)) > 1e-4  # it moved
        for k, (a, b) in enumerate(curve.gaps()):
            inner = evolved.lambdas[5:-5, k]
            assert inner.min() >= a - 1e-6 and inner.max() <= b + 1e-6


class TestLinearizedResidual:
    def test_constant_state_vanishes(self):
        phi = np.ones((5, 32))
        qg = 0.3 * np.ones((5, 32))
        assert linearized_residual(phi, qg, dx=0.1, dt=0.01) == 0.0

    def test_travelling_profile_within_scheme_error(self):
        lam = -0.2
        nt, nx = 7, 400
        xs = np.linspace(0.0, PERIOD, nx, endpoint=False)
        dt = 1e-3
        qg = np.array([[cnoidal_jet(x)[0] for x in xs]] * nt)
        phi = 2 * lam + qg
        res = linearized_residual(phi, qg, dx=float(xs[1] - xs[0]), dt=dt)
        assert res < 1e-3

    def test_noise_detector_fires(self):
        rng = np.random.default_rng(0)
        phi = rng.normal(size=(5, 64))
        qg = rng.normal(size=(5, 64))
        assert linearized_residual(phi, qg, dx=0.05, dt=0.01) > 1.0
