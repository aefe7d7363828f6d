"""Exact-arithmetic verification of the rational symmetric identity."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from soliton_forge.errors import DomainError
from soliton_forge.symmetry import (
    RationalVector,
    symmetric_sum,
    symmetric_sum_via_quotient,
    vandermonde_cofactor_sum,
    vandermonde_product,
)

_distinct_vectors = st.lists(
    st.fractions(min_value=-30, max_value=30, max_denominator=8),
    min_size=2,
    max_size=7,
    unique=True,
).map(RationalVector)


class TestVandermondeProduct:
    def test_pair(self):
        assert vandermonde_product(RationalVector((5, 3))) == 2

    def test_single(self):
        assert vandermonde_product(RationalVector((7,))) == 1

    def test_swap_flips_sign(self):
        xs = RationalVector((1, 4, Fraction(9, 2)))
        swapped = RationalVector((4, 1, Fraction(9, 2)))
        assert vandermonde_product(xs) == -vandermonde_product(swapped)

    def test_duplicate_vanishes_on_raw_sequence(self):
        assert vandermonde_product((3, 5, 3)) == 0

    def test_constructor_rejects_duplicates(self):
        with pytest.raises(ValueError):
            RationalVector((1, 1, 2))


class TestCofactorSum:
    def test_low_exponents_vanish(self):
        rng = random.Random(11)
        for _ in range(25):
            size = rng.randint(2, 6)
            entries = set()
            while len(entries) < size:
                entries.add(Fraction(rng.randint(-40, 40), rng.randint(1, 9)))
            xs = RationalVector(tuple(entries))
            for j in range(size - 1):
                assert vandermonde_cofactor_sum(xs, j) == 0

    def test_top_exponent_reproduces_product(self):
        xs = RationalVector((Fraction(1, 3), -2, 5, Fraction(7, 2)))
        assert vandermonde_cofactor_sum(xs, len(xs) - 1) == vandermonde_product(xs)

    def test_pair_linear(self):
        xs = RationalVector((Fraction(5), Fraction(3)))
        assert vandermonde_cofactor_sum(xs, 1) == 2  # a - b


class TestSymmetricSum:
    def test_pair_low(self):
        assert symmetric_sum(RationalVector((1, 2)), 0) == 0

    def test_pair_top(self):
        assert symmetric_sum(RationalVector((1, 2)), 1) == 1

    def test_domain_error_above_top(self):
        with pytest.raises(DomainError):
            symmetric_sum(RationalVector((1, 2, 3)), 3)

    @given(xs=_distinct_vectors, data=st.data())
    @settings(max_examples=80, deadline=None)
    def test_exact_values_and_quotient_agreement(self, xs, data):
        mu = data.draw(st.integers(min_value=0, max_value=len(xs) - 1))
        want = Fraction(1) if mu == len(xs) - 1 else Fraction(0)
        direct = symmetric_sum(xs, mu)
        assert direct == want
        assert symmetric_sum_via_quotient(xs, mu) == direct

    @given(xs=_distinct_vectors, data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_permutation_invariance(self, xs, data):
        mu = data.draw(st.integers(min_value=0, max_value=len(xs) - 1))
        perm = data.draw(st.permutations(xs.entries))
        assert symmetric_sum(RationalVector(tuple(perm)), mu) == symmetric_sum(xs, mu)

    @given(xs=_distinct_vectors, scale=st.fractions(min_value=-4, max_value=4, max_denominator=5).filter(bool))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance_of_claimed_values(self, xs, scale):
        scaled = RationalVector(tuple(scale * e for e in xs.entries))
        n = len(xs) - 1
        assert symmetric_sum(scaled, n) == 1
        if n >= 1:
            assert symmetric_sum(scaled, 0) == 0

    def test_two_hundred_random_vectors_sizes_2_to_9(self):
        rng = random.Random(20240817)
        for _ in range(200):
            size = rng.randint(2, 9)
            entries = set()
            while len(entries) < size:
                entries.add(Fraction(rng.randint(-60, 60), rng.randint(1, 10)))
            xs = RationalVector(tuple(entries))
            n = size - 1
            for mu in range(n + 1):
                want = Fraction(1) if mu == n else Fraction(0)
                assert symmetric_sum(xs, mu) == want
                assert symmetric_sum_via_quotient(xs, mu) == want
