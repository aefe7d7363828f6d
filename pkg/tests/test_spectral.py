"""Curve construction from field jets and the auxiliary spectrum."""

import numpy as np
import pytest

from soliton_forge.elliptic import CnoidalParams, cnoidal_profile, kdv_field, sech_soliton
from soliton_forge.errors import ComplexAuxSpectrum, DegenerateCurve
from soliton_forge.kdv_hierarchy import curve_polynomial
from soliton_forge.spectral import (
    AuxiliaryPoint,
    SpectralCurveNumeric,
    aux_spectrum,
    curve_eval,
    curve_from_profile,
)

CNOIDAL = CnoidalParams(1.0, 0.0, -1.0)


def cnoidal_jet(x: float):
    return kdv_field(cnoidal_profile(CNOIDAL, x))


class TestCurveFromProfile:
    def test_zero_field_degenerates(self):
        with pytest.raises(DegenerateCurve):
            curve_from_profile(1, (0.0, 0.0, 0.0, 0.0, 0.0))

    def test_cnoidal_isospectrality(self):
        coeffs = np.array(
            [curve_from_profile(1, cnoidal_jet(x)).coeffs for x in np.linspace(0, 4, 50)]
        )
        spread = coeffs.max(axis=0) - coeffs.min(axis=0)
        assert np.max(spread) < 1e-8

    def test_cnoidal_reference_curve(self):
        curve = curve_from_profile(1, cnoidal_jet(0.7))
        assert np.allclose(curve.coeffs, (0.0, -0.25, 0.0, 1.0), atol=1e-12)
        assert np.allclose(curve.branch_points, (-0.5, 0.0, 0.5), atol=1e-12)

    def test_sech_coefficients_match_symbolic_evaluation(self):
        jet = sech_soliton(2.0, 0.0, 0.4)
        curve = curve_from_profile(1, jet)
        expected = [float(c.evaluate(tuple(jet.values))) for c in curve_polynomial(1).coeffs]
        assert np.allclose(curve.coeffs, expected, atol=1e-13)

    def test_branch_point_expansion_consistency(self):
        curve = curve_from_profile(1, cnoidal_jet(1.2))
        re_expanded = np.poly(curve.branch_points)[::-1]
        assert np.allclose(re_expanded, curve.coeffs, rtol=1e-10, atol=1e-12)


class TestCurveConstructors:
    def test_from_branch_points(self):
        curve = SpectralCurveNumeric.from_branch_points([2, -2, 0, 1, -1])
        assert curve.n == 2
        assert curve.branch_points == (-2, -1, 0, 1, 2)
        assert curve.coeffs[-1] == 1.0
        assert curve.gaps() == [(-2, -1), (0, 1)]

    def test_from_branch_points_allows_degenerate(self):
        curve = SpectralCurveNumeric.from_branch_points([0, 0, 1])
        assert curve.n == 1

    def test_from_coeffs_requires_monic(self):
        with pytest.raises(ValueError):
            SpectralCurveNumeric.from_coeffs((0.0, -0.25, 0.0, 2.0))

    def test_from_coeffs_detects_complex_roots(self):
        # X^3 + X has roots 0, +-i
        with pytest.raises(DegenerateCurve):
            SpectralCurveNumeric.from_coeffs((0.0, 1.0, 0.0, 1.0))

    def test_oval_weight_positive_on_gaps(self):
        curve = SpectralCurveNumeric.from_branch_points([-2, -1, 0, 1, 2])
        for k, (a, b) in enumerate(curve.gaps()):
            for lam in np.linspace(a, b, 25):
                assert curve.oval_weight(k, lam) > 0

    def test_gap_of(self):
        curve = SpectralCurveNumeric.from_branch_points([-2, -1, 0, 1, 2])
        assert curve.gap_of(-1.5) == 0
        assert curve.gap_of(0.25) == 1
        with pytest.raises(ValueError):
            curve.gap_of(1.5)


class TestCurveEval:
    curve = SpectralCurveNumeric.from_branch_points([-1.0, 0.0, 1.0])

    def test_vanishes_at_branch_points(self):
        for e in self.curve.branch_points:
            assert abs(curve_eval(self.curve, e)) < 1e-10

    def test_cubic_value(self):
        assert curve_eval(self.curve, 2.0) == pytest.approx(6.0, abs=1e-12)

    def test_monic_leading_behavior(self):
        x = 1e6
        assert curve_eval(self.curve, x) / x**3 == pytest.approx(1.0, rel=1e-9)


class TestAuxSpectrum:
    def test_genus_one_root_is_half_field(self):
        jet = cnoidal_jet(0.9)
        (pt,) = aux_spectrum(1, jet)
        assert pt.lam == pytest.approx(-jet[0] / 2, abs=1e-13)

    def test_constant_field(self):
        (pt,) = aux_spectrum(1, (0.75, 0.0, 0.0, 0.0, 0.0))
        assert pt.lam == pytest.approx(-0.375, abs=1e-14)

    def test_genus_two_hand_solved(self):
        # second derivative -8, field 0: roots of 8 lam^2 - 8
        pt1, pt2 = aux_spectrum(2, (0.0, 0.0, -8.0, 0.0, 0.0))
        assert pt1.lam == pytest.approx(-1.0, abs=1e-12)
        assert pt2.lam == pytest.approx(1.0, abs=1e-12)

    def test_sign_tracks_profile_slope(self):
        rising = cnoidal_jet(0.9)
        assert aux_spectrum(1, rising)[0].sign == (1 if rising[1] > 0 else -1)

    def test_complex_spectrum_rejected(self):
        # constant field with positive curvature term: 8 lam^2 + 8 has no real roots
        with pytest.raises(ComplexAuxSpectrum):
            aux_spectrum(2, (0.0, 0.0, 8.0, 0.0, 0.0))

    def test_reconstruction_identity(self):
        for x in np.linspace(0.1, 3.5, 20):
            jet = cnoidal_jet(x)
            points = aux_spectrum(1, jet)
            assert -2 * sum(p.lam for p in points) == pytest.approx(jet[0], abs=1e-9)

    def test_interlacing_with_branch_points(self):
        jet = cnoidal_jet(1.7)
        curve = curve_from_profile(1, jet)
        (pt,) = aux_spectrum(1, jet)
        a, b = curve.gaps()[0]
        assert a - 1e-9 <= pt.lam <= b + 1e-9


class TestAuxiliaryPoint:
    def test_sign_validation(self):
        with pytest.raises(ValueError):
            AuxiliaryPoint(0.0, 2)
