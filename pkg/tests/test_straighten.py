import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from clifford_bracket.core import BracketFactor, BracketPolynomial, DomainError, VariableContext, order_key
from clifford_bracket.oracle import check_zero
from clifford_bracket.parser import parse
from clifford_bracket.randgen import PolyConfig, random_bracket_polynomial
from clifford_bracket.straighten import (
    _Engine,
    _rules,
    absorb,
    bracket_reduction_rhs,
    caianiello_expand,
    canonicalize,
    check_basic_identities,
    db,
    default_partition,
    fundamental_reduction,
    general_shuffle,
    general_shuffle_rhs,
    igp,
    interior_normalize,
    is_straight,
    leader_of,
    new_reduction_first,
    shuffle,
    shuffle_rhs,
    split,
    split_rhs,
    straighten,
    to_tableau,
)
from clifford_bracket.unibracket import generate_BG, to_unibracket, unibracket_normal_form

from conftest import bracket_polys, homogeneous_bracket_polys

V1, V2, V3, V4, V5 = 0, 1, 2, 3, 4


def B(*e):
    return BracketFactor(tuple(e))


def term(c, *brackets):
    return BracketPolynomial.term(c, [B(*b) for b in brackets])


def lead_key(atoms, squares=()):
    return order_key(leader_of(atoms, squares))


def leaders_drop(before_atoms, rhs):
    top = lead_key(before_atoms)
    return all(lead_key(atoms, sq) < top for atoms, sq in rhs.mapping)


class TestCaianiello:
    def test_four(self):
        want = term(1, (V1, V2), (V3, V4)) - term(1, (V1, V3), (V2, V4)) + term(1, (V1, V4), (V2, V3))
        assert caianiello_expand(B(V1, V2, V3, V4)) == want

    def test_two_is_fixed(self):
        assert caianiello_expand(B(V1, V2)) == BracketPolynomial.bracket((V1, V2))

    def test_five_has_ten_terms(self):
        out = caianiello_expand(B(V1, V2, V3, V4, V5))
        assert len(out.mapping) == 10
        assert all(sorted(a.length for a in atoms) == [2, 3] for atoms, _ in out.mapping)
        assert check_zero(out - BracketPolynomial.bracket((V1, V2, V3, V4, V5)))

    def test_default_partition(self):
        assert default_partition(7) == [2, 2, 3]
        assert default_partition(6) == [2, 2, 2]

    @pytest.mark.parametrize("part", [[2, 2, 2], [2, 4], [4, 2], [6], [2, 2, 2, 2], [3, 2, 2], [2, 2, 2, 3]])
    def test_partitions_preserve_value(self, part):
        rng = random.Random(sum(part))
        f = B(*(rng.randrange(5) for _ in range(sum(part))))
        out = caianiello_expand(f, part)
        assert check_zero(out - BracketPolynomial.bracket(f.entries))
        assert all(sorted(a.length for a in atoms) == sorted(part) for atoms, _ in out.mapping)

    @pytest.mark.parametrize("part", [[2, 3], [1, 5], [3, 3], [3, 2, 3]])
    def test_invalid_partition(self, part):
        with pytest.raises(DomainError):
            caianiello_expand(B(V1, V2, V3, V4, V5, V1), part)


class TestFormulas:
    def test_fundamental_single_letter(self):
        out = fundamental_reduction(V3, (V2,), V1)
        assert check_zero(BracketPolynomial.term(1, [V3, V2, V1]) - out)

    def test_fundamental_conditions(self):
        with pytest.raises(DomainError):
            fundamental_reduction(V1, (V2,), V3)
        with pytest.raises(DomainError):
            fundamental_reduction(V3, (), V1)

    def test_interior_normal_unchanged(self):
        f = B(V2, V3, V1)
        assert interior_normalize(f) == BracketPolynomial.bracket(f.entries)

    def test_interior_reduces(self):
        f = B(V4, V3, V2, V1)
        out = interior_normalize(f)
        assert out == bracket_reduction_rhs((), V4, (V3,), V2, (V1,))
        assert check_zero(out - BracketPolynomial.bracket(f.entries))
        assert leaders_drop((f,), canonicalize(out))

    def test_absorb_minimal(self):
        out = absorb(B(V3, V1), B(V2, V1))
        want = term(Fraction(1, 2), (V2, V1, V3, V1)) + term(Fraction(1, 2), (V1, V2, V3, V1))
        assert out == want
        assert check_zero(out - term(1, (V3, V1), (V2, V1)))

    def test_absorb_conditions(self):
        with pytest.raises(DomainError):
            absorb(B(V1, V3), B(V2, V1))

    def test_shuffle_five_terms(self):
        f, g = B(V3, V2), B(V4, V1, V5)
        out = shuffle(f, g, b_len=1)
        assert out == shuffle_rhs((V3,), V2, (V4,), V1, (V5,))
        # [B] and [C] are length-1 brackets, so two of the five terms vanish
        assert len(out.mapping) == 3
        assert check_zero(out - BracketPolynomial.term(1, [f, g]))
        with pytest.raises(DomainError):
            shuffle(B(V2, V3), g, b_len=1)

    def test_general_shuffle_without_d_is_shuffle(self):
        rng = random.Random(3)
        for _ in range(20):
            a, b, c = (tuple(rng.randrange(5) for _ in range(rng.randint(1, 2))) for _ in range(3))
            v, w = rng.randrange(5), rng.randrange(5)
            diff = general_shuffle_rhs(a, v, (), b, w, c) - shuffle_rhs(a, v, b, w, c)
            assert check_zero(diff)

    def test_general_shuffle_smallest(self):
        f, g = B(V4, V2, V1), B(V5, V1, V3)
        out = general_shuffle(f, g, 1, 1)
        assert check_zero(out - BracketPolynomial.term(1, [f, g]))

    def test_split_two_blocks(self):
        out = split(B(V4, V1, V3, V2), [(V4, V1), (V3, V2)])
        assert out == term(2, (V4, V1), (V3, V2)) - term(1, (V2, V3, V4, V1))

    def test_split_three_recursion(self):
        blocks = [(V5, V1), (V4, V2), (V3, V1)]
        two = split_rhs(blocks[:2])
        want = (two * BracketPolynomial.bracket(blocks[2])).scale(2) - term(1, (V1, V3, V5, V1, V4, V2))
        assert split_rhs(blocks) == want

    def test_split_conditions(self):
        with pytest.raises(DomainError):
            split(B(V1, V2, V3, V4))

    @pytest.mark.parametrize("seed", range(4))
    def test_leaders_drop_at_the_leader_window(self, seed):
        # applied where the engine applies them: the leftmost reducible
        # window of a canonical term's leader
        rng = random.Random(seed)
        used = set()
        for _ in range(300):
            p = random_bracket_polynomial(rng, PolyConfig(n=5, max_terms=1))
            for (atoms, sq), _c in canonicalize(p).mapping.items():
                eng = _Engine(_rules((8,) * 5), 10**6)
                if eng._final(atoms, sq):
                    continue
                res = eng.step(atoms, sq)
                if res is None:
                    continue
                name, rhs = res
                used.add(name)
                assert check_zero(rhs - BracketPolynomial.term(1, atoms, sq), trials=3)
                top = lead_key(atoms, sq)
                for at, s2 in canonicalize(rhs).mapping:
                    k = lead_key(at, s2)
                    assert k < top or (k == top and len(at) > len(atoms)), (name, atoms)
        assert used == {"absorb", "shuffle", "bracket:reduction", "split"}


class TestIdentities:
    def test_igp(self):
        assert check_zero(igp([V1, V2, V3, V4, V5]))

    def test_db(self):
        assert check_zero(db([V1, V2, V3, V4, V5, 5]))

    def test_new_reduction_two_by_two(self):
        assert check_zero(new_reduction_first((V1, V2), (V3, V4)))

    def test_bracket_reduction(self):
        lhs = BracketPolynomial.bracket((V1, V4, V2, V3, V5))
        assert check_zero(lhs - bracket_reduction_rhs((V1,), V4, (V2,), V3, (V5,)))

    def test_every_family(self):
        reports = check_basic_identities(count=15, trials=5)
        assert len(reports) == 12
        assert all(r.ok and r.instances == 15 for r in reports), [r.name for r in reports if not r.ok]


class TestStraightForm:
    def test_examples(self):
        assert is_straight((B(V1, V2), B(V2, V3, V4)))
        assert not is_straight((B(V1, V2, V4), B(V2, V3)))
        assert is_straight((B(V1, V2, V3),))

    def test_yz_orientation_accepted(self):
        assert is_straight((B(V2, V1), B(V3, V4, V2)))

    def test_tableau_rows(self):
        assert to_tableau((B(V2, V1), B(V3, V4, V2))).rows == ((V1, V2), (V2, V3, V4))

    def test_malformed(self):
        assert not is_straight((B(V3, V1, V2, V1),))


class TestStraighten:
    def test_two_bracket_fixed(self):
        p = BracketPolynomial.bracket((V2, V1))
        assert straighten(p) == p

    def test_straight_product_fixed(self):
        p = term(1, (V1, V2), (V2, V3, V4))
        assert straighten(p, orientation="straight") == p
        assert straighten(p) == term(1, (V2, V1), (V3, V4, V2))

    def test_constants_pass(self):
        assert straighten(BracketPolynomial.constant(3)) == BracketPolynomial.constant(3)
        assert straighten(BracketPolynomial()) == BracketPolynomial()

    def test_bare_vectors_rejected(self):
        with pytest.raises(DomainError):
            straighten(BracketPolynomial.term(1, [V1, V2]))

    def test_unknown_strategy(self):
        with pytest.raises(DomainError):
            straighten(BracketPolynomial.bracket((V2, V1)), strategy="magic")

    def test_bg_element_annihilated(self):
        for counts in ([1, 1, 1, 1], [2, 1, 1], [2, 2, 1]):
            for e in generate_BG(VariableContext.standard(len(counts), counts)):
                # bracket the whole expansion back up: a value-zero bracket polynomial
                rebracketed = BracketPolynomial(
                    {((B(*m.left),) if len(m.left) >= 2 else (), m.squares): c for m, c in e.poly.terms.items()
                     if len(m.left) != 1}
                )
                assert straighten(rebracketed) == BracketPolynomial()

    def test_trace(self):
        res = straighten(parse("[v3v1v2][v2v1]")[1], trace=True)
        assert res.trace and res.polynomial == straighten(parse("[v3v1v2][v2v1]")[1])

    @settings(max_examples=40)
    @given(bracket_polys(n=4, max_len=4))
    def test_idempotent_and_straight(self, p):
        out = straighten(p)
        assert straighten(out) == out
        assert all(is_straight(atoms) for atoms, _ in out.mapping)

    @settings(max_examples=40)
    @given(bracket_polys(n=4, max_len=4))
    def test_value(self, p):
        assert check_zero(p - straighten(p), trials=3)

    @settings(max_examples=40)
    @given(bracket_polys(n=4, max_len=4))
    def test_strategies_agree(self, p):
        assert straighten(p, strategy="rewrite") == straighten(p)

    @settings(max_examples=30)
    @given(homogeneous_bracket_polys(n=3, degree=5), homogeneous_bracket_polys(n=3, degree=5))
    def test_equality_decision(self, p, q):
        same = straighten(p) == straighten(q)
        assert same == (straighten(p - q) == BracketPolynomial())
        assert same == bool(check_zero(p - q, trials=5))

    @settings(max_examples=30)
    @given(homogeneous_bracket_polys(n=3, degree=5), homogeneous_bracket_polys(n=3, degree=5))
    def test_layers_agree(self, p, q):
        a = straighten(p) == straighten(q)
        b = unibracket_normal_form(to_unibracket(p)) == unibracket_normal_form(to_unibracket(q))
        assert a == b
