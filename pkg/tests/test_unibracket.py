from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from clifford_bracket.core import (
    BracketFactor,
    BracketPolynomial,
    DomainError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    expand,
)
from clifford_bracket.oracle import check_zero
from clifford_bracket.unibracket import (
    brute_force_normal,
    contents_of_size,
    generate_BG,
    is_multilinear_unibracket_normal,
    is_unibracket_normal,
    probe_predicates,
    to_unibracket,
    uni_base,
    unibracket_normal_form,
)

from conftest import homogeneous_bracket_polys

V1, V2, V3, V4 = 0, 1, 2, 3


def nf(p, **kw):
    return unibracket_normal_form(p, **kw)


class TestToUnibracket:
    def test_pair(self):
        want = VVPolynomial({VVMonomial((V1, V2)): Fraction(1, 2), VVMonomial((V2, V1)): Fraction(1, 2)})
        assert to_unibracket(BracketPolynomial.bracket((V1, V2))) == want

    def test_product_of_pairs(self):
        p = BracketPolynomial.term(1, [BracketFactor((V1, V2)), BracketFactor((V3, V4))])
        out = to_unibracket(p)
        assert len(out) == 4 and set(dict(out.terms).values()) == {Fraction(1, 4)}

    def test_squares_migrate(self):
        out = to_unibracket(VVPolynomial.monomial((V1, V1, V2)))
        assert out == VVPolynomial({VVMonomial((V2,), (V1,)): 1})

    def test_mixed_degrees(self):
        p = BracketPolynomial.bracket((V1, V2)) + BracketPolynomial.bracket((V1, V2, V3))
        with pytest.raises(DomainError):
            to_unibracket(p)

    def test_degree_against_context(self):
        with pytest.raises(DomainError):
            to_unibracket(BracketPolynomial.bracket((V1, V2)), VariableContext.standard(3))

    @given(homogeneous_bracket_polys(n=4, degree=4))
    def test_center_value(self, p):
        assert check_zero(to_unibracket(p) - expand(p), trials=3)


class TestNormalForm:
    def test_reversion_symmetry(self):
        a = nf(BracketPolynomial.bracket((V3, V2, V1)))
        b = nf(BracketPolynomial.bracket((V1, V2, V3), -1))
        assert a == b

    def test_shift_symmetry(self):
        assert nf(BracketPolynomial.bracket((V1, V2, V3))) == nf(BracketPolynomial.bracket((V2, V3, V1)))

    def test_removal_element_vanishes(self):
        p = BracketPolynomial.term(2, [V1, BracketFactor((V2, V3))])
        assert nf(p) == VVPolynomial()

    def test_idempotent(self):
        p = BracketPolynomial.bracket((V3, V1, V4, V2))
        once = nf(p)
        assert nf(once) == once

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            nf(BracketPolynomial.bracket((V1, V2, V3)), method="guess")

    @settings(max_examples=40)
    @given(homogeneous_bracket_polys(n=3, degree=5))
    def test_methods_agree(self, p):
        assert nf(p) == nf(p, method="linear")

    @settings(max_examples=40)
    @given(homogeneous_bracket_polys(n=3, degree=5))
    def test_variants_agree(self, p):
        assert nf(p, variant="remark") == nf(p, variant="theorem")

    @settings(max_examples=40)
    @given(homogeneous_bracket_polys(n=4, degree=4))
    def test_center_value_preserved(self, p):
        diff = to_unibracket(p) - nf(p)
        assert check_zero(diff, center=True, trials=3)

    @settings(max_examples=40)
    @given(homogeneous_bracket_polys(n=3, degree=4))
    def test_terms_are_normal(self, p):
        assert all(is_unibracket_normal(t) for t in nf(p).terms)


class TestBase:
    def test_multilinear_contains_r12(self):
        els = generate_BG(VariableContext.standard(3))
        assert any(e.family == "R12" for e in els)

    def test_repeated_variable_admits_squared_family(self):
        els = generate_BG(VariableContext.standard(2, [2, 1]))
        assert any(e.family == "Sq1" for e in els)
        els = generate_BG(VariableContext.standard(2, [2, 1]), "theorem")
        assert any(e.family == "R1" for e in els)

    def test_too_small(self):
        with pytest.raises(DomainError):
            generate_BG(VariableContext.standard(2))
        with pytest.raises(DomainError):
            generate_BG(VariableContext.standard(1, [4]))

    @pytest.mark.parametrize("variant", ["remark", "theorem"])
    @pytest.mark.parametrize("counts", [[1, 1, 1], [2, 1, 1], [1, 1, 1, 1], [2, 2, 1], [3, 2]])
    def test_elements_vanish_in_center(self, variant, counts):
        for e in generate_BG(VariableContext.standard(len(counts), counts), variant):
            assert check_zero(e.form, center=True, trials=3), e.form
            assert check_zero(e.poly, center=True, trials=3)

    @pytest.mark.parametrize("variant", ["remark", "theorem"])
    def test_leaders_match_echelon_reference(self, variant):
        for m in (3, 4, 5):
            for content in contents_of_size(3, m):
                base = uni_base(content)
                assert set(base.elements(variant)) == base.leading_monomials(), content

    def test_quotient_dimension_multilinear(self):
        base = uni_base(((0, 1), (1, 1), (2, 1)))
        assert base.quotient_dimension() == len(brute_force_normal(Counter({0: 1, 1: 1, 2: 1})))


class TestPredicate:
    def test_multilinear_form_one(self):
        assert is_multilinear_unibracket_normal(VVMonomial((V1, V2, V3, V4)))
        assert is_unibracket_normal(VVMonomial((V1, V2, V3, V4)))

    def test_leader_present(self):
        assert not is_unibracket_normal(VVMonomial((V3, V2, V1)))

    def test_empty(self):
        assert is_unibracket_normal(VVMonomial(()))

    # Words where the strict reading of the leading-variable clause disagrees
    # with exhaustive elimination; the non-strict reading is exact.
    @pytest.mark.parametrize("w", [(0, 1, 2, 1), (1, 2, 3, 2), (0, 2, 3, 2), (0, 1, 3, 1), (0, 1, 2, 3, 1)])
    def test_non_strict_clause(self, w):
        t = VVMonomial(w)
        truth = t in brute_force_normal(Counter(w))
        assert truth
        assert is_unibracket_normal(t, strict=False)
        assert not is_unibracket_normal(t, strict=True)

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_probe_exhaustive(self, m):
        for content in contents_of_size(4, m):
            assert not probe_predicates(content).loose_mismatch, content

    def test_multilinear_predicate_exhaustive(self):
        for m in (3, 4, 5):
            content = tuple((i, 1) for i in range(m))
            truth = brute_force_normal(content)
            for t in uni_base(content).normal_monomials():
                assert is_multilinear_unibracket_normal(t) == (t in truth), t
