import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clifford_bracket.core import (
    BracketFactor,
    BracketPolynomial,
    BracketTerm,
    ContextError,
    DomainError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    bracket_leader,
    canonical_form,
    compare,
    expand,
    fold,
    orient_brackets,
    reversion,
)
from clifford_bracket.oracle import Evaluator, check_zero, random_assignment

from conftest import bracket_polys, vv_polys, words

V1, V2, V3 = 0, 1, 2


class TestContext:
    def test_standard_names(self):
        ctx = VariableContext.standard(3)
        assert ctx.names == ("v1", "v2", "v3")
        assert (ctx.n, ctx.m) == (3, 3)

    def test_from_order_with_multiset(self):
        ctx = VariableContext.from_order("a<b<c", {"a": 2, "c": 1})
        assert ctx.counts == (2, 0, 1)
        assert ctx.m == 3

    def test_duplicate_names(self):
        with pytest.raises(ContextError):
            VariableContext(("a", "a"))

    def test_unknown_multiset_key(self):
        with pytest.raises(ContextError):
            VariableContext.from_order("a<b", {"z": 1})

    def test_check_rejects_unknown_variable(self):
        with pytest.raises(ContextError):
            VariableContext.standard(2).check([5])


class TestReversion:
    def test_example(self):
        assert reversion((V1, V2, V3)) == ((V3, V2, V1), 1)

    def test_empty(self):
        assert reversion(()) == ((), 1)

    @given(words())
    def test_involution(self, w):
        once, _ = reversion(w)
        assert reversion(once)[0] == w
        assert len(once) == len(w)


class TestLeaders:
    def test_reverse_wins_odd(self):
        assert bracket_leader(BracketFactor((V1, V3, V2))) == ((V2, V3, V1), -1)

    def test_reverse_wins_even(self):
        assert bracket_leader(BracketFactor((V1, V2))) == ((V2, V1), 1)

    def test_palindrome(self):
        assert bracket_leader(BracketFactor((V1, V2, V1))) == ((V1, V2, V1), 1)

    def test_too_short(self):
        with pytest.raises(DomainError):
            bracket_leader((V1,))

    def test_orient_examples(self):
        t = BracketTerm(Fraction(1), (BracketFactor((V1, V3, V2)),))
        assert orient_brackets(t) == BracketTerm(Fraction(-1), (BracketFactor((V2, V3, V1)),))
        t = BracketTerm(Fraction(2), (BracketFactor((V1, V2)), BracketFactor((V1, V3))))
        out = orient_brackets(t)
        assert out.coefficient == 2
        assert out.atoms == (BracketFactor((V2, V1)), BracketFactor((V3, V1)))

    @given(bracket_polys())
    def test_orient_preserves_value(self, p):
        q = BracketPolynomial([orient_brackets(t) for t in p.terms])
        assert check_zero(p - q, trials=3)


class TestOrder:
    def test_lex(self):
        assert compare(VVMonomial((V1, V2)), VVMonomial((V2, V1))) == -1

    def test_reflexive(self):
        m = VVMonomial((V2, V3, V1))
        assert compare(m, m) == 0

    def test_square_placement_is_equal(self):
        a = VVMonomial((V2,), (V1,))
        b = VVMonomial((V1, V1, V2))
        assert canonical_form(a) == canonical_form(b) == (V1, V1, V2)

    def test_degree_first(self):
        assert compare(VVMonomial((V3, V3)), VVMonomial((V1, V1, V1))) == -1

    def test_canonical_examples(self):
        assert canonical_form(VVMonomial((V2, V3), (V1, V3))) == (V1, V1, V2, V3, V3, V3)
        assert canonical_form(VVMonomial((V1, V2, V3))) == (V1, V2, V3)
        assert canonical_form(VVMonomial((), (V2,))) == (V2, V2)

    @given(words(3, 0, 3), st.lists(st.integers(0, 2), max_size=2))
    def test_canonical_is_minimal_placement(self, left, squares):
        m = VVMonomial(left, tuple(sorted(squares)))
        # brute force: every way to place each square pair somewhere in the word
        cands = {left}
        for v in sorted(squares):
            cands = {w[:i] + (v, v) + w[i:] for w in cands for i in range(len(w) + 1)}
        assert canonical_form(m) == min(cands)

    @given(words(3, 0, 3), st.lists(st.integers(0, 2), max_size=2))
    def test_canonical_value(self, left, squares):
        m = VVMonomial(left, tuple(sorted(squares)))
        diff = VVPolynomial({m: 1}) - VVPolynomial({VVMonomial(canonical_form(m)): 1})
        assert check_zero(diff, trials=3)


class TestFold:
    def test_stack_cancellation(self):
        assert fold((V2, V1, V1, V2, V3)) == VVMonomial((V3,), (V1, V2))

    def test_whole_square(self):
        assert fold((V1, V1)) == VVMonomial((), (V1,))

    @given(words(3, 0, 7))
    def test_fold_value(self, w):
        diff = VVPolynomial({VVMonomial(w): 1}) - VVPolynomial({fold(w): 1})
        assert check_zero(diff, trials=3)


class TestPolynomials:
    @given(vv_polys(), vv_polys(), vv_polys())
    def test_ring_laws(self, a, b, c):
        assert a + b == b + a
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a - a == VVPolynomial()

    def test_zero_coefficients_dropped(self):
        p = VVPolynomial.monomial((V1,), 2) + VVPolynomial.monomial((V1,), -2)
        assert not p and len(p) == 0

    def test_iteration_highest_first(self):
        p = VVPolynomial.monomial((V1, V2)) + VVPolynomial.monomial((V2, V1))
        assert [m.left for m, _ in p] == [(V2, V1), (V1, V2)]

    def test_length_one_bracket_kills_term(self):
        assert BracketPolynomial.bracket((V1,)) == BracketPolynomial()

    def test_empty_bracket_is_one(self):
        assert BracketPolynomial.bracket(()) == BracketPolynomial.constant(1)

    def test_expand_single_bracket(self):
        want = VVPolynomial({VVMonomial((V1, V2)): Fraction(1, 2), VVMonomial((V2, V1)): Fraction(1, 2)})
        assert expand(BracketPolynomial.bracket((V1, V2))) == want

    def test_expand_product_has_quarter_coefficients(self):
        p = BracketPolynomial.term(1, [BracketFactor((0, 1)), BracketFactor((2, 3))])
        e = expand(p)
        assert len(e) == 4 and set(dict(e.terms).values()) == {Fraction(1, 4)}

    @given(bracket_polys())
    def test_expand_preserves_value(self, p):
        ev = Evaluator(random_assignment(range(4), random.Random(1)))
        assert ev(p) == ev(expand(p))

    def test_content_bound(self):
        p = BracketPolynomial.term(1, [BracketFactor((0, 0, 1))]) + BracketPolynomial.term(1, [0, 0, 0])
        assert p.content_bound() == Counter({0: 3, 1: 1})

    def test_brackets_commute_in_value(self):
        p = BracketPolynomial.term(1, [BracketFactor((0, 1, 2)), BracketFactor((1, 3))])
        q = BracketPolynomial.term(1, [BracketFactor((1, 3)), BracketFactor((0, 1, 2))])
        assert check_zero(p - q, trials=3)
