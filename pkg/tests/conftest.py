from fractions import Fraction

import hypothesis.strategies as st

from soliton_forge.diffpoly import DiffPoly

_coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6).filter(bool)


def _mono_pool(max_weight: int):
    pool = []
    for w in range(max_weight + 1):
        pool.extend(DiffPoly.monomials_of_weight(w))
    return pool


@st.composite
def diff_polys(draw, max_weight: int = 10, max_terms: int = 4) -> DiffPoly:
    """Random differential polynomials of bounded scaling weight."""
    pool = _mono_pool(max_weight)
    picks = draw(
        st.lists(
            st.tuples(st.sampled_from(pool), _coeffs),
            min_size=0,
            max_size=max_terms,
        )
    )
    terms: dict = {}
    for mono, c in picks:
        terms[mono] = terms.get(mono, Fraction(0)) + c
    return DiffPoly(terms)
