import itertools
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clifford_bracket.core import (
    BracketPolynomial,
    DomainError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    expand,
    fold,
    order_key,
)
from clifford_bracket.gbasis import (
    FuelExhausted,
    generate,
    generate_general,
    generate_multilinear,
    generate_squarefree,
    is_normal_shape,
    migrate_squares,
    normal_monomials,
    reduce,
    reduce_traced,
)
from clifford_bracket.oracle import brute_force_closure, check_zero

from conftest import words

V1, V2, V3 = 0, 1, 2


def mono(*w, squares=()):
    return VVPolynomial({VVMonomial(tuple(w), tuple(squares)): 1})


def rhs(rs, *w):
    return rs.index[tuple(w)].rhs


class TestGeneration:
    def test_g3_rule(self):
        rs = generate_multilinear(VariableContext.standard(3))
        want = mono(V1, V2, V3) + mono(V1, V3, V2) - mono(V2, V3, V1)
        assert rhs(rs, V3, V2, V1) == want

    def test_n3_is_g3_only(self):
        rs = generate_multilinear(VariableContext.standard(3))
        assert {r.tag for r in rs} == {"G3"}
        assert len(rs) == 2

    def test_n4_multilinear_families(self):
        rs = generate_multilinear(VariableContext.standard(4))
        tags = Counter(r.tag for r in rs)
        assert tags["G3"] == 8 and tags["G4"] > 0

    def test_eg2_rules(self):
        rs = generate_general(VariableContext.standard(2, [3, 3]))
        assert rhs(rs, V2, V2, V1) == mono(V1, V2, V2)
        assert rhs(rs, V2, V1, V1) == mono(V1, V1, V2)

    def test_n2_is_eg2_only(self):
        rs = generate_general(VariableContext.standard(2, [3, 3]))
        assert {r.tag for r in rs} == {"EG2"}

    def test_eg3_leader(self):
        rs = generate_general(VariableContext.standard(3, [3, 3, 3]))
        assert [r.lhs for r in rs if r.tag == "EG3"] == [(V3, V2, V3, V1)]

    def test_squarefree_n3_families(self):
        # EG4 would need four strictly increasing indices out of three
        rs = generate_squarefree(VariableContext.standard(3, [6, 6, 6]))
        assert Counter(r.tag for r in rs) == {"fold": 3, "G3": 2, "EG3": 1}

    def test_squarefree_fold_rules(self):
        rs = generate_squarefree(VariableContext.standard(2, [2, 2]))
        assert reduce(mono(V1, V1, V2), rs) == mono(V2, squares=(V1,))

    def test_multilinear_too_small(self):
        with pytest.raises(DomainError):
            generate_multilinear(VariableContext.standard(2))

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            generate("tropical", VariableContext.standard(3))

    @pytest.mark.parametrize("kind,counts", [("multilinear", [1] * 4), ("general", [3, 3, 3]), ("squarefree", [2, 2, 2])])
    def test_rules_lie_in_ideal(self, kind, counts):
        rs = generate(kind, VariableContext.standard(len(counts), counts))
        for r in rs:
            assert check_zero(r.as_polynomial(), trials=3), (r.tag, r.lhs)

    def test_rhs_strictly_lower(self):
        rs = generate_general(VariableContext.standard(3, [3, 3, 3]))
        for r in rs:
            top = order_key(VVMonomial(r.lhs))
            assert all(order_key(fold(m.left, m.squares)) < top for m in r.rhs.terms)


class TestReduce:
    def test_expanded_bracket(self):
        rs = generate_multilinear(VariableContext.standard(3))
        p = expand(BracketPolynomial.bracket((V1, V2, V3), 2))
        assert reduce(p, rs) == mono(V2, V3, V1) - mono(V1, V3, V2)

    def test_ascending_unchanged(self):
        rs = generate_multilinear(VariableContext.standard(3))
        assert reduce(mono(V1, V2, V3), rs) == mono(V1, V2, V3)

    def test_zero(self):
        rs = generate_multilinear(VariableContext.standard(3))
        assert reduce(VVPolynomial(), rs) == VVPolynomial()

    def test_fuel(self):
        rs = generate_multilinear(VariableContext.standard(5))
        with pytest.raises(FuelExhausted):
            reduce(mono(4, 3, 2, 1, 0), rs, fuel=1)

    def test_trace_lands_on_result(self):
        rs = generate_multilinear(VariableContext.standard(4))
        p = mono(3, 2, 1, 0)
        out, steps = reduce_traced(p, rs)
        assert out == reduce(p, rs) and steps

    def test_migrate_squares(self):
        assert migrate_squares(mono(V2, V1, V1, V2, V3)) == mono(V3, squares=(V1, V2))

    @given(words(3, 0, 6))
    def test_general_value_and_idempotent(self, w):
        rs = generate_general(VariableContext.standard(3, [6, 6, 6]))
        p = mono(*w)
        r = reduce(p, rs)
        assert reduce(r, rs) == r
        assert check_zero(p - r, trials=3)
        assert all(rs.is_reduced(m) for m in r.terms)

    @given(words(4, 0, 6))
    def test_squarefree_value_and_idempotent(self, w):
        rs = generate_squarefree(VariableContext.standard(4, [6] * 4))
        p = mono(*w)
        r = reduce(p, rs)
        assert reduce(r, rs) == r
        assert check_zero(p - r, trials=3)

    @given(st.permutations(range(5)))
    def test_multilinear_value(self, w):
        rs = generate_multilinear(VariableContext.standard(5))
        p = mono(*w)
        assert check_zero(p - reduce(p, rs), trials=3)


class TestConfluence:
    def test_every_rewrite_path_agrees(self):
        rs = generate_general(VariableContext.standard(3, [5, 5, 5]))
        for w in itertools.product(range(3), repeat=4):
            res = brute_force_closure(VVMonomial(w), rs)
            assert res.unique, w
            assert res.fixed_point == reduce(mono(*w), rs)


class TestShapes:
    def test_examples(self):
        assert is_normal_shape(VVMonomial((V1, V2, V3)), "multilinear")
        assert is_normal_shape(VVMonomial((V2, V1, V3)), "multilinear")
        assert not is_normal_shape(VVMonomial((V3, V2, V1)), "multilinear")
        assert not is_normal_shape(VVMonomial((V1, V1)), "squarefree")
        assert is_normal_shape(VVMonomial((V2,), (V1,)), "squarefree")
        assert not is_normal_shape(VVMonomial((V1,), (V1,)), "general")

    @pytest.mark.parametrize("kind,n,counts,deg", [
        ("multilinear", 4, [1] * 4, 4),
        ("general", 3, [4, 4, 4], 4),
        ("squarefree", 3, [4, 4, 4], 4),
    ])
    def test_shape_equals_reduced(self, kind, n, counts, deg):
        rs = generate(kind, VariableContext.standard(n, counts))
        for k in range(deg + 1):
            for w in itertools.product(range(n), repeat=k):
                t = VVMonomial(w)
                if not rs.admits(t):
                    continue
                if kind == "squarefree":
                    t = fold(w)
                assert is_normal_shape(t, kind) == rs.is_reduced(t), (kind, w)

    def test_normal_monomials_are_reduced(self):
        rs = generate_general(VariableContext.standard(3, [3, 3, 3]))
        ms = normal_monomials(Counter({0: 2, 1: 1, 2: 1}), rs)
        assert ms and all(rs.is_reduced(m) for m in ms)
        assert ms == sorted(ms, key=order_key)
