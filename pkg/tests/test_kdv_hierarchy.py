"""Exact verification of the recursion tower and its structural theorems."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from soliton_forge.diffpoly import DiffPoly, LambdaPoly, apply_B, total_derivative
from soliton_forge.errors import CheckFailed
from soliton_forge.kdv_hierarchy import (
    SolitonCombination,
    basic_soliton,
    combination_constancy,
    combination_soliton,
    conserved_density,
    curve_polynomial,
    hierarchy_level,
    invariant_polynomial,
    soliton_residual,
    stationary_equation,
    verify_invariant_structure,
)

q = DiffPoly.q()
q1, q2, q3, q4 = (DiffPoly.q(k) for k in range(1, 5))


class TestConservedDensities:
    def test_seed(self):
        assert conserved_density(-1) == DiffPoly.constant(Fraction(1, 2))

    def test_level_zero_is_field(self):
        assert conserved_density(0) == q

    def test_level_one(self):
        assert conserved_density(1) == q2 + 3 * q * q

    def test_level_two(self):
        expected = q4 + 10 * q * q2 + 5 * q1 * q1 + 10 * q**3
        assert conserved_density(2) == expected

    def test_recursion_exactness(self):
        for n in range(-1, 5):
            lhs = total_derivative(conserved_density(n + 1))
            assert lhs == apply_B(conserved_density(n))

    def test_weight_homogeneity(self):
        for n in range(0, 6):
            f = conserved_density(n)
            parts = f.weight_components()
            assert list(parts) == [2 * n + 2]

    def test_memoized_identity(self):
        assert conserved_density(3) is conserved_density(3)

    def test_rejects_below_seed(self):
        with pytest.raises(ValueError):
            conserved_density(-2)


class TestBasicSolitons:
    def test_degree_zero(self):
        assert basic_soliton(0) == LambdaPoly([DiffPoly.constant(Fraction(1, 2))])

    def test_degree_one(self):
        assert basic_soliton(1) == LambdaPoly([q, DiffPoly.constant(2)])

    def test_degree_two(self):
        expected = LambdaPoly([q2 + 3 * q * q, 4 * q, DiffPoly.constant(8)])
        assert basic_soliton(2) == expected

    def test_leading_coefficient(self):
        for n in range(6):
            lead = basic_soliton(n).coeffs[-1]
            assert lead == DiffPoly.constant(Fraction(4**n, 2))


class TestSolitonResidual:
    def test_degree_zero(self):
        res = soliton_residual(basic_soliton(0))
        assert res == LambdaPoly([q1])

    def test_degree_one(self):
        res = soliton_residual(basic_soliton(1))
        assert res == LambdaPoly([q3 + 6 * q * q1])

    def test_degree_two_collapses_to_level_one_image(self):
        res = soliton_residual(basic_soliton(2))
        assert res == LambdaPoly([apply_B(conserved_density(1))])

    def test_telescoping_all_levels(self):
        # the spectral powers cancel and only the level below survives
        for n in range(0, 6):
            res = soliton_residual(basic_soliton(n))
            assert res.degree <= 0
            assert res.coeff(0) == apply_B(conserved_density(n - 1))


class TestStationaryEquations:
    def test_level_zero(self):
        assert stationary_equation(0) == q1

    def test_level_one(self):
        assert stationary_equation(1) == q3 + 6 * q * q1

    def test_level_two_fifth_order(self):
        expected = (
            DiffPoly.q(5) + 10 * q * q3 + 20 * q1 * q2 + 30 * q * q * q1
        )
        assert stationary_equation(2) == expected


class TestCombinations:
    def test_single(self):
        assert combination_constancy(SolitonCombination((1,))) == q

    def test_padding(self):
        assert combination_constancy(SolitonCombination((1, 0))) == conserved_density(1)

    def test_flux_with_constant(self):
        combo = SolitonCombination((1, 2))
        assert combination_constancy(combo) == q2 + 3 * q * q + 2 * q

    def test_rejects_zero_leader(self):
        with pytest.raises(ValueError):
            SolitonCombination((0, 1))

    def test_soliton_side_matches(self):
        combo = SolitonCombination((1, Fraction(1, 2)))
        psi = combination_soliton(combo)
        assert psi == basic_soliton(1) + Fraction(1, 2) * basic_soliton(0)

    @given(
        alphas=st.lists(
            st.fractions(min_value=-4, max_value=4, max_denominator=5),
            min_size=1,
            max_size=4,
        ).filter(lambda a: a[0] != 0)
    )
    @settings(max_examples=25, deadline=None)
    def test_derivative_linearity(self, alphas):
        combo = SolitonCombination(tuple(alphas))
        lhs = total_derivative(combination_constancy(combo))
        rhs = DiffPoly.zero()
        for i, a in enumerate(alphas):
            rhs = rhs + a * total_derivative(conserved_density(combo.n - i))
        assert lhs == rhs


class TestInvariantPolynomial:
    def test_degree(self):
        for n in range(4):
            assert invariant_polynomial(n).degree == 2 * n + 1

    def test_level_zero_closed_form(self):
        # constant soliton: only the potential term contributes
        h = invariant_polynomial(0)
        assert h == LambdaPoly([Fraction(1, 2) * q, DiffPoly.constant(Fraction(-1, 2))])

    def test_structure_levels_0_to_4(self):
        for n in range(5):
            report = verify_invariant_structure(n)
            assert report.n == n
            assert len(report.checked) == (n + 2) + max(0, n)

    def test_structure_bound(self):
        with pytest.raises(ValueError):
            verify_invariant_structure(5)

    def test_detector_fires_on_corrupted_soliton(self, monkeypatch):
        import soliton_forge.kdv_hierarchy as kh

        def corrupted(n):
            return basic_soliton(n) + LambdaPoly([q])  # breaks the closed form

        monkeypatch.setattr(kh, "basic_soliton", corrupted)
        with pytest.raises(CheckFailed):
            kh.verify_invariant_structure(1)


class TestCurvePolynomial:
    def test_monic(self):
        for n in range(4):
            p = curve_polynomial(n)
            assert p.coeffs[-1] == DiffPoly.constant(1)

    def test_genus_one_matches_cubic(self):
        p = curve_polynomial(1)
        assert p.coeff(2) == DiffPoly.zero()
        assert p.coeff(1) == Fraction(-1, 4) * (q2 + 3 * q * q)
        constant = (
            Fraction(1, 8) * (q**3 + Fraction(1, 2) * q1 * q1)
            - Fraction(1, 8) * q * (q2 + 3 * q * q)
        )
        assert p.coeff(0) == constant

    def test_genus_two_vanishing_window(self):
        p = curve_polynomial(2)
        assert p.coeff(4) == DiffPoly.zero()
        assert p.coeff(3) == DiffPoly.zero()

    def test_genus_two_density_slot(self):
        assert curve_polynomial(2).coeff(2) == Fraction(-1, 16) * conserved_density(2)


class TestHierarchyLevel:
    def test_bundles_consistently(self):
        level = hierarchy_level(2)
        assert level.F == conserved_density(2)
        assert level.phi == basic_soliton(2)
