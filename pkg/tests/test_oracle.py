import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clifford_bracket.core import BracketPolynomial, DomainError, VariableContext, VVMonomial, VVPolynomial
from clifford_bracket.gbasis import generate_general, generate_multilinear, reduce
from clifford_bracket.oracle import (
    E1,
    E2,
    E3,
    IOTA,
    Multivector8,
    bracket_of,
    brute_force_closure,
    check_zero,
    conjugate,
    eval_poly,
    mul,
    quotient_dimension,
)
from clifford_bracket.straighten import igp

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)
multivectors = st.lists(rationals, min_size=8, max_size=8).map(lambda c: Multivector8(tuple(c)))


class TestAlgebra:
    def test_metric(self):
        assert mul(E1, E1) == Multivector8.scalar(-1)

    def test_anticommuting_generators(self):
        e12 = mul(E1, E2)
        assert e12 == Multivector8.basis(4)
        assert mul(E2, E1) == -e12

    def test_pseudoscalar_is_central(self):
        e123 = mul(mul(E1, E2), E3)
        assert e123 == IOTA
        assert mul(e123, E1) == mul(E1, e123)

    @given(multivectors, multivectors, multivectors)
    def test_associative(self, a, b, c):
        assert mul(mul(a, b), c) == mul(a, mul(b, c))

    @given(multivectors, multivectors, rationals)
    def test_bilinear(self, a, b, k):
        assert mul(a * k, b) == mul(a, b) * k
        assert mul(a + b, b) == mul(a, b) + mul(b, b)

    def test_conjugate_of_vector(self):
        assert conjugate(E1) == -E1


class TestBracket:
    def test_pseudoscalar(self):
        v = bracket_of(mul(mul(E1, E2), E3))
        assert (v.scalar, v.pseudo) == (0, 1)

    def test_orthogonal_pair(self):
        v = bracket_of(mul(E1, E2))
        assert (v.scalar, v.pseudo) == (0, 0)

    def test_scalar(self):
        v = bracket_of(Multivector8.scalar(Fraction(3, 2)))
        assert (v.scalar, v.pseudo) == (Fraction(3, 2), 0)

    @given(st.lists(st.lists(rationals, min_size=3, max_size=3), min_size=1, max_size=5))
    def test_half_sum_with_conjugate_is_central(self, vecs):
        a = Multivector8.scalar(1)
        for x in vecs:
            a = mul(a, Multivector8.vector(*x))
        half = (a + conjugate(a)) * Fraction(1, 2)
        assert all(half.coords[i] == 0 for i in range(1, 7))
        assert bracket_of(a).as_multivector() == half


class TestEval:
    def test_inner_product(self):
        p = BracketPolynomial.bracket((0, 1))
        assert eval_poly(p, {0: (1, 0, 0), 1: (1, 0, 0)}) == Multivector8.scalar(-1)

    def test_square_part(self):
        p = VVPolynomial({VVMonomial((1,), (0,)): 1})
        assert eval_poly(p, {0: (1, 0, 0), 1: (0, 1, 0)}) == -E2

    def test_missing_variable(self):
        with pytest.raises(DomainError):
            eval_poly(VVPolynomial.monomial((3,)), {0: (1, 0, 0)})


class TestCheckZero:
    def test_igp_vanishes(self):
        assert check_zero(igp([0, 1, 2, 3, 4]), trials=20)

    def test_commutator_does_not(self):
        p = VVPolynomial.monomial((0, 1)) - VVPolynomial.monomial((1, 0))
        res = check_zero(p)
        assert not res and res.witness is not None

    def test_zero(self):
        assert check_zero(VVPolynomial())

    def test_single_variable_nonzero(self):
        assert not check_zero(VVPolynomial.monomial((0,)))


class TestClosure:
    def test_g3_leader(self):
        rs = generate_multilinear(VariableContext.standard(3))
        m = VVMonomial((2, 1, 0))
        res = brute_force_closure(m, rs)
        assert res.unique
        assert res.fixed_point == reduce(VVPolynomial({m: 1}), rs)

    def test_ascending(self):
        rs = generate_multilinear(VariableContext.standard(3))
        res = brute_force_closure(VVMonomial((0, 1, 2)), rs)
        assert res.reachable == {VVMonomial((0, 1, 2))}

    def test_degree_four_general(self):
        rs = generate_general(VariableContext.standard(3, [4, 4, 4]))
        rng = random.Random(0)
        for _ in range(20):
            m = VVMonomial(tuple(rng.randrange(3) for _ in range(4)))
            assert brute_force_closure(m, rs).unique

    def test_degree_cap(self):
        rs = generate_multilinear(VariableContext.standard(3))
        with pytest.raises(DomainError):
            brute_force_closure(VVMonomial((0,) * 7), rs)


class TestQuotientDimension:
    def test_degree_zero(self):
        assert quotient_dimension(0, VariableContext.standard(3)) == 1

    def test_methods_agree(self):
        ctx = VariableContext.standard(3, [2, 2, 2])
        for m in range(1, 5):
            assert quotient_dimension(m, ctx, method="ideal") == quotient_dimension(m, ctx, method="eval")

    def test_multilinear_degree_two(self):
        # v_i v_j for i != j: no relation of degree 2 among distinct letters
        assert quotient_dimension(2, VariableContext.standard(3), "multilinear") == 6
