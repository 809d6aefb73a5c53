from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from clifford_bracket.core import BracketFactor, BracketPolynomial, VVMonomial, VVPolynomial

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def words(n=4, min_size=0, max_size=6):
    return st.lists(st.integers(0, n - 1), min_size=min_size, max_size=max_size).map(tuple)


def brackets(n=4, min_len=2, max_len=4):
    return words(n, min_len, max_len).map(BracketFactor)


@st.composite
def bracket_polys(draw, n=4, max_terms=3, max_factors=3, max_len=4):
    """Sums of bracket monomials (no bare atoms, no squares)."""
    acc = {}
    for _ in range(draw(st.integers(0, max_terms))):
        atoms = tuple(draw(st.lists(brackets(n, 2, max_len), min_size=1, max_size=max_factors)))
        c = draw(st.integers(-4, 4).filter(bool))
        acc[(atoms, ())] = acc.get((atoms, ()), 0) + c
    return BracketPolynomial(acc)


@st.composite
def homogeneous_bracket_polys(draw, n=4, degree=5, max_terms=3):
    """Bracket polynomials whose terms all have the given degree."""
    acc = {}
    for _ in range(draw(st.integers(1, max_terms))):
        lengths, left = [], degree
        while left:
            k = left if left <= 3 else draw(st.integers(2, left - 2))
            lengths.append(k)
            left -= k
        atoms = tuple(BracketFactor(draw(words(n, k, k))) for k in lengths)
        acc[(atoms, ())] = acc.get((atoms, ()), 0) + draw(st.integers(-3, 3).filter(bool))
    return BracketPolynomial(acc)


@st.composite
def vv_polys(draw, n=3, max_degree=5, max_terms=4):
    acc = {}
    for _ in range(draw(st.integers(0, max_terms))):
        m = VVMonomial(draw(words(n, 0, max_degree)))
        acc[m] = acc.get(m, 0) + Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 3)))
    return VVPolynomial(acc)
