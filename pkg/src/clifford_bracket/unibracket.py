"""Uni-bracket layer: the removal ideal, the base BG[M] and lowest-representative normal forms.

A uni-bracket polynomial of content M is stored as a degree-m VVPolynomial
whose monomials are folded (no adjacent equal letters on the left of □).
Terms of different content never interact, so every operation works one
content class at a time.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .core import (
    BracketFactor,
    BracketPolynomial,
    DomainError,
    InternalError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    Word,
    expand,
    fold,
    is_folded,
    order_key,
)
from .gbasis import (
    FuelExhausted,
    RuleSet,
    default_fuel,
    fold_rule,
    generate_squarefree,
    is_normal_shape,
    migrate_squares,
    normal_monomials,
    reduce,
)
from .linalg import RankTracker

VARIANTS = ("remark", "theorem")
METHODS = ("bg", "linear")

Content = tuple[tuple[int, int], ...]


def content_key(c: Counter) -> Content:
    return tuple(sorted((v, k) for v, k in c.items() if k))


def _context(content: Content) -> VariableContext:
    size = max((v for v, _ in content), default=-1) + 1
    counts = [0] * size
    for v, k in content:
        counts[v] = k
    return VariableContext(tuple(f"x{i}" for i in range(size)), tuple(counts))


def squarefree_rules(ctx: VariableContext) -> RuleSet:
    """Square-free base, degrading to the folding rules alone below two letters."""
    if sum(1 for c in ctx.counts if c) >= 2:
        return generate_squarefree(ctx)
    rules = tuple(fold_rule(v) for v, c in enumerate(ctx.counts) if c >= 2)
    return RuleSet("squarefree", ctx, rules)


def to_unibracket(p: BracketPolynomial | VVPolynomial, ctx: VariableContext | None = None) -> VVPolynomial:
    """Expand every bracket by 2[A] = A + (-1)^a A† and fold squares.

    Reading the expansion as the representative of one outer bracket is
    legitimate modulo the removal ideal.
    """
    vv = expand(p) if isinstance(p, BracketPolynomial) else p
    degrees = vv.degrees()
    if ctx is not None:
        ctx.check(v for t in vv.terms for v in t.left + t.squares)
        if degrees - {ctx.m}:
            raise DomainError(f"uni-bracket input must have degree m={ctx.m}, found {sorted(degrees)}")
    elif len(degrees) > 1:
        raise DomainError(f"uni-bracket input mixes degrees {sorted(degrees)}")
    return migrate_squares(vv)


# ------------------------------------------------------------- BG elements


@dataclass(frozen=True)
class BGElement:
    """One base element: its defining bracket form and its I□-normal expansion (monic)."""

    family: str
    form: BracketPolynomial
    poly: VVPolynomial
    leader: VVMonomial


def _square_splits(content: Content) -> Iterator[tuple[Counter, Word]]:
    """Every way to set square pairs aside: (left content, squares)."""
    items = list(content)

    def rec(i, left, sq):
        if i == len(items):
            yield Counter({v: k for v, k in left if k}), tuple(sorted(sq))
            return
        v, k = items[i]
        for r in range(k // 2 + 1):
            yield from rec(i + 1, left + [(v, k - 2 * r)], sq + [v] * r)

    yield from rec(0, [], [])


def _ascending_subsets(letters: Sequence[int]) -> Iterator[Word]:
    """Non-empty strictly ascending sequences drawn from distinct letters."""
    letters = sorted(set(letters))
    for mask in range(1, 1 << len(letters)):
        yield tuple(v for i, v in enumerate(letters) if mask >> i & 1)


def _r_blocks(rest: Counter, b1: int, j: int) -> Iterator[list[tuple[Word, int]]]:
    """Block lists [(Y1,b1)..(Yj,b1),(Y,z)..] exhausting ``rest``.

    Each Y is non-empty, strictly ascending and free of b1; a z after the b1
    blocks differs from b1 and satisfies z < first(Y).
    """

    def rec(rest: Counter, blocks, left_b1):
        if left_b1 == 0 and not +rest:
            yield list(blocks)
            return
        avail = [v for v, k in rest.items() if k > 0 and v != b1]
        for y in _ascending_subsets(avail):
            r2 = rest.copy()
            r2.subtract(y)
            if left_b1 > 0:
                r2[b1] -= 1
                yield from rec(r2, blocks + [(y, b1)], left_b1 - 1)
            else:
                for z in sorted(v for v, k in r2.items() if k > 0 and v != b1 and v < y[0]):
                    r3 = r2.copy()
                    r3[z] -= 1
                    yield from rec(r3, blocks + [(y, z)], 0)

    yield from rec(rest, [], j)


class UniBase:
    """The base BG[M] for one content M, with an exact linear-algebra reference.

    ``rules`` is the square-free base of the vector-variable ring over M; BG
    elements are stored I□-reduced and monic, indexed by leader.
    """

    def __init__(self, content: Content):
        self.content = content
        self.ctx = _context(content)
        self.m = sum(k for _, k in content)
        self.rules = squarefree_rules(self.ctx)
        self._bg: dict[str, dict[VVMonomial, BGElement]] = {}
        self._nf_memo: dict[tuple[str, VVMonomial], dict] = {}
        self._linear: tuple | None = None

    # --- reference: echelon form of the removal ideal modulo I□
    def _reference(self):
        if self._linear is None:
            monos = normal_monomials(Counter(dict(self.content)), self.rules)
            monos.sort(key=order_key, reverse=True)
            col = {t: i for i, t in enumerate(monos)}
            tracker = RankTracker()
            sign = -1 if self.m % 2 else 1
            seen = set()
            for w in _words(self.content):
                if w in seen:
                    continue
                seen.add(w)
                seen.add(w[::-1])
                g = VVPolynomial({fold(w): 1}) - VVPolynomial({fold(w[::-1]): sign})
                row = {col[t]: c for t, c in self.nf_i(g).terms.items()}
                tracker.add(row)
            self._linear = (monos, col, tracker)
        return self._linear

    def nf_i(self, p: VVPolynomial) -> VVPolynomial:
        return reduce(p, self.rules)

    def normal_monomials(self) -> list[VVMonomial]:
        """I□-normal monomials of content M, highest first."""
        return self._reference()[0]

    def leading_monomials(self) -> set[VVMonomial]:
        """Leading terms of the degree-m syzygy ideal among I□-normal monomials."""
        monos, _, tracker = self._reference()
        return {monos[c] for c in tracker.pivots}

    def quotient_dimension(self) -> int:
        monos, _, tracker = self._reference()
        return len(monos) - tracker.rank

    def linear_normal_form(self, p: VVPolynomial) -> VVPolynomial:
        monos, col, tracker = self._reference()
        q = self.nf_i(migrate_squares(p))
        row = tracker.reduce({col[t]: c for t, c in q.terms.items()})
        # back-substitute until no pivot column remains
        while True:
            hit = [c for c in row if c in tracker.pivots]
            if not hit:
                break
            c = min(hit)
            f = row[c]
            for k, v in tracker.pivots[c].items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return VVPolynomial({monos[c]: v for c, v in row.items()})

    # --- the closed-form base
    def elements(self, variant: str = "remark") -> dict[VVMonomial, BGElement]:
        if variant not in VARIANTS:
            raise DomainError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        if variant not in self._bg:
            out: dict[VVMonomial, BGElement] = {}
            for el in self._enumerate(variant):
                if el.leader in out:
                    raise InternalError(f"two BG elements share the leader {el.leader}")
                out[el.leader] = el
            self._bg[variant] = out
        return self._bg[variant]

    def _element(self, family: str, form: BracketPolynomial, leader: VVMonomial) -> BGElement:
        poly = self.nf_i(migrate_squares(expand(form)))
        if not poly:
            raise InternalError(f"{family} element {form} vanishes modulo I")
        lt, lc = poly.leading_term()
        if lt != leader:
            raise InternalError(f"{family} element {form} leads with {lt}, expected {leader}")
        return BGElement(family, form, poly.scale(1 / lc), leader)

    def _enumerate(self, variant: str) -> Iterator[BGElement]:
        for left, squares in _square_splits(self.content):
            k = sum(left.values())
            if k == 0:
                continue
            b1 = min(left)
            # S1: A b1 B - b1 B A with A ascending, b1-free and A b1 B reduced
            for a in _ascending_subsets([v for v in left if v != b1]):
                rest = left.copy()
                rest.subtract(a)
                rest[b1] -= 1
                for b in _words(content_key(rest)):
                    w = a + (b1,) + b
                    t = VVMonomial(w, squares)
                    if not is_folded(w) or not self.rules.is_reduced(t):
                        continue
                    form = BracketPolynomial.term(1, w, squares) - BracketPolynomial.term(1, (b1,) + b + a, squares)
                    yield self._element("S1", form, t)
            # R family
            rest = left.copy()
            rest[b1] -= 1
            j = left[b1] - 1
            for blocks in _r_blocks(rest, b1, j):
                word = (b1,) + tuple(v for y, z in blocks for v in y + (z,))
                t = VVMonomial(word, squares)
                if not is_folded(word) or not self.rules.is_reduced(t):
                    continue
                brackets = [BracketFactor(y + (z,)) for y, z in blocks]
                if variant == "remark" and j > 0:
                    y1 = blocks[0][0]
                    head = BracketPolynomial.term(1, (b1,) + y1 + (b1,) + tuple(brackets[1:]), squares)
                    tail = BracketPolynomial.term(1, y1 + tuple(brackets[1:]), squares + (b1,))
                    yield self._element("Sq1", head - tail, t)
                else:
                    family = "R1" if variant == "theorem" or not blocks else "R12"
                    yield self._element(family, BracketPolynomial.term(1, (b1, *brackets), squares), t)

    # --- reduction by the base
    def normal_form(self, p: VVPolynomial, variant: str = "remark", budget: list[int] | None = None) -> VVPolynomial:
        base = self.elements(variant)
        budget = budget if budget is not None else [default_fuel()]
        q = self.nf_i(migrate_squares(p))
        acc: dict[VVMonomial, Fraction] = {}
        for t, c in q.terms.items():
            for x, cx in self._nf_monomial(t, variant, base, budget).items():
                acc[x] = acc.get(x, 0) + c * cx
        return VVPolynomial(acc)

    def _nf_monomial(self, t: VVMonomial, variant: str, base, budget) -> dict:
        key = (variant, t)
        hit = self._nf_memo.get(key)
        if hit is not None:
            return hit
        el = base.get(t)
        if el is None:
            out = {t: Fraction(1)}
        else:
            budget[0] -= 1
            if budget[0] < 0:
                raise FuelExhausted("uni-bracket reduction fuel exhausted")
            acc: dict[VVMonomial, Fraction] = {}
            kt = order_key(t)
            for u, cu in el.poly.terms.items():
                if u == t:
                    continue
                if order_key(u) >= kt:
                    raise InternalError(f"BG element led by {t} has a higher term {u}")
                for x, cx in self._nf_monomial(u, variant, base, budget).items():
                    acc[x] = acc.get(x, 0) - cu * cx
            out = {k: v for k, v in acc.items() if v}
        self._nf_memo[key] = out
        return out


def _words(content: Content) -> Iterator[Word]:
    """Distinct words of exactly the given content, in lexicographic order."""
    letters = sorted(v for v, _ in content)
    rest = dict(content)
    total = sum(rest.values())
    cur: list[int] = []

    def rec():
        if len(cur) == total:
            yield tuple(cur)
            return
        for v in letters:
            if rest[v]:
                rest[v] -= 1
                cur.append(v)
                yield from rec()
                cur.pop()
                rest[v] += 1

    yield from rec()


@lru_cache(maxsize=256)
def uni_base(content: Content) -> UniBase:
    return UniBase(content)


def _split_by_content(p: VVPolynomial) -> dict[Content, VVPolynomial]:
    groups: dict[Content, dict] = {}
    for t, c in p.terms.items():
        groups.setdefault(content_key(t.content()), {})[t] = c
    return {k: VVPolynomial._raw(v) for k, v in groups.items()}


def generate_BG(ctx: VariableContext, variant: str = "remark") -> list[BGElement]:
    """BG[M] for the multiset of ``ctx``, sorted by leader."""
    if ctx.m < 3:
        raise DomainError("BG[M] needs m >= 3")
    if sum(1 for c in ctx.counts if c) < 2:
        raise DomainError("BG[M] needs n >= 2")
    base = uni_base(content_key(ctx.content()))
    return sorted(base.elements(variant).values(), key=lambda e: order_key(e.leader))


def unibracket_normal_form(
    p: BracketPolynomial | VVPolynomial,
    ctx: VariableContext | None = None,
    variant: str = "remark",
    method: str = "bg",
    fuel: int | None = None,
) -> VVPolynomial:
    """Lowest-representative normal form, computed content class by content class."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    q = to_unibracket(p, ctx)
    budget = [default_fuel() if fuel is None else fuel]
    out = VVPolynomial()
    for content, part in _split_by_content(q).items():
        if sum(k for _, k in content) == 0:
            out = out + part
            continue
        base = uni_base(content)
        if method == "linear":
            out = out + base.linear_normal_form(part)
        else:
            out = out + base.normal_form(part, variant, budget)
    return out


# ------------------------------------------------------------ predicates


def _blocks_after_b1(word: Word) -> tuple[list[tuple[Word, int]], Word] | None:
    """Parse word[1:] into (Y, z) blocks at strict descents plus a trailing Y."""
    blocks: list[tuple[Word, int]] = []
    cur: list[int] = []
    for i in range(1, len(word)):
        v = word[i]
        if cur and v < cur[-1]:
            blocks.append((tuple(cur), v))
            cur = []
        elif not cur and blocks and v < blocks[-1][1]:
            return None
        else:
            cur.append(v)
    return blocks, tuple(cur)


def is_unibracket_normal(t: VVMonomial, strict: bool = False) -> bool:
    """Whether ``t`` is a normal uni-bracket monomial.

    Forms: b1 Y1 b1 .. Yj b1 Y z .. Y z Y (ending in a block Y), or the same
    ending in z where some non-b1 block has first(Y) <= z (< with ``strict``).
    """
    w = t.left
    if not w:
        return True
    if len(w) == 1 or not is_normal_shape(t, "squarefree"):
        return False
    b1 = min(w)
    if w[0] != b1:
        return False
    parsed = _blocks_after_b1(w)
    if parsed is None:
        return False
    blocks, tail = parsed
    if tail:
        return True
    for y, z in blocks:
        if z == b1:
            continue
        if (y[0] < z) if strict else (y[0] <= z):
            return True
    return False


def is_multilinear_unibracket_normal(t: VVMonomial) -> bool:
    """Forms (I) 1 2 C, (II) 1 A 2 Y2 z2 .. Yk and (III) 1 A 2 Y2 z2 .. Yk zk with some l_i < z_i."""
    w = t.left
    if t.squares or len(set(w)) != len(w) or len(w) < 3:
        return False
    if not is_normal_shape(t, "multilinear"):
        return False
    one, two = sorted(w)[:2]
    if w[0] != one:
        return False
    if w[1] == two:
        return True
    parsed = _blocks_after_b1(w)
    if parsed is None:
        return False
    blocks, tail = parsed
    if not blocks or blocks[0][1] != two:
        return False
    if tail:
        return True
    return any(y[0] < z for y, z in blocks[1:])


def brute_force_normal(content: Counter | Content) -> set[VVMonomial]:
    """Normal monomials read off the exact echelon form (no closed-form base)."""
    key = content if isinstance(content, tuple) else content_key(content)
    base = uni_base(key)
    lead = base.leading_monomials()
    return {t for t in base.normal_monomials() if t not in lead}


@dataclass
class ProbeResult:
    content: Content
    normal: int
    strict_mismatch: list[VVMonomial] = field(default_factory=list)
    loose_mismatch: list[VVMonomial] = field(default_factory=list)


def probe_predicates(content: Counter | Content) -> ProbeResult:
    """Compare both readings of the leader clause against the echelon reference."""
    key = content if isinstance(content, tuple) else content_key(content)
    base = uni_base(key)
    truth = brute_force_normal(key)
    res = ProbeResult(key, len(truth))
    for t in base.normal_monomials():
        ok = t in truth
        if is_unibracket_normal(t, strict=True) != ok:
            res.strict_mismatch.append(t)
        if is_unibracket_normal(t, strict=False) != ok:
            res.loose_mismatch.append(t)
    return res


def contents_of_size(n: int, m: int) -> Iterator[Content]:
    """Every content of total size m over n letters using at least two letters."""

    def rec(i, left, acc):
        if i == n:
            if left == 0 and sum(1 for _, k in acc) >= 2:
                yield tuple(acc)
            return
        for k in range(left + 1):
            yield from rec(i + 1, left - k, acc + ([(i, k)] if k else []))

    yield from rec(0, m, [])


__all__ = [
    "BGElement",
    "UniBase",
    "brute_force_normal",
    "contents_of_size",
    "generate_BG",
    "is_multilinear_unibracket_normal",
    "is_unibracket_normal",
    "probe_predicates",
    "to_unibracket",
    "unibracket_normal_form",
    "uni_base",
]
