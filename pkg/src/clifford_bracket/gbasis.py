"""Closed-form Gröbner bases of the vector-variable syzygy ideals and the reduction engine."""
from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence

from .core import (
    DomainError,
    InternalError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    Word,
    fold,
    is_folded,
    order_key,
)

KINDS = ("multilinear", "general", "squarefree")
DEFAULT_FUEL = 10**6


def default_fuel() -> int:
    env = os.environ.get("CLIFFORD_BRACKET_FUEL")
    return int(env) if env else DEFAULT_FUEL


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: VVPolynomial
    tag: str

    @property
    def family(self) -> int:
        """Precedence when several rules match at one position."""
        if self.tag == "fold":
            return 0
        if self.tag == "EG2":
            return 1
        if self.tag == "G3":
            return 2
        return 3 if self.tag.startswith("EG") else 4

    def as_polynomial(self) -> VVPolynomial:
        """lhs - rhs, an element of the ideal."""
        return VVPolynomial.monomial(self.lhs) - self.rhs


def _bracket_half(word: Word, coef) -> list[tuple[Word, Fraction]]:
    sign = -1 if len(word) % 2 else 1
    c = Fraction(coef) / 2
    return [(word, c), (word[::-1], c * sign)]


def rule_from_binomial(x: Word, y: Word, tag: str, expected: Word | None = None) -> RewriteRule:
    """Expand [x] - [y] by definition and solve for its leading word."""
    acc: dict[Word, Fraction] = {}
    for w, c in _bracket_half(x, 1) + _bracket_half(y, -1):
        acc[w] = acc.get(w, 0) + c
    acc = {w: c for w, c in acc.items() if c}
    lead = max(acc)
    if expected is not None and lead != expected:
        raise InternalError(f"{tag}: leader {lead} differs from expected {expected}")
    lc = acc.pop(lead)
    rhs = VVPolynomial({VVMonomial(w): -c / lc for w, c in acc.items()})
    return _checked(RewriteRule(lead, rhs, tag))


def _checked(rule: RewriteRule) -> RewriteRule:
    top = order_key(VVMonomial(rule.lhs))
    for m in rule.rhs.terms:
        if order_key(fold(m.left, m.squares)) >= top:
            raise InternalError(f"rule {rule.tag} {rule.lhs}: rhs term {m} is not lower")
    return rule


def g3_rules(a: int, b: int, c: int) -> list[RewriteRule]:
    """For a < b < c: cba and cab."""
    return [
        rule_from_binomial((c, b, a), (a, c, b), "G3", (c, b, a)),
        rule_from_binomial((c, a, b), (b, c, a), "G3", (c, a, b)),
    ]


def gj_rule(idx: Sequence[int]) -> RewriteRule:
    """[i3 i2 i4 .. ij i1] - [i2 i4 .. ij i1 i3]."""
    i1, i2, i3, *rest = idx
    x = (i3, i2, *rest, i1)
    y = (i2, *rest, i1, i3)
    return rule_from_binomial(x, y, f"G{len(idx)}", x)


def egj_rule(idx: Sequence[int]) -> RewriteRule:
    """[i3 i2 i3 i4 .. ij i1] - [i2 i3 i4 .. ij i1 i3]."""
    i1, i2, i3, *rest = idx
    x = (i3, i2, i3, *rest, i1)
    y = (i2, i3, *rest, i1, i3)
    return rule_from_binomial(x, y, f"EG{len(idx)}", x)


def eg2_rules(a: int, b: int) -> list[RewriteRule]:
    """For a < b: bba -> abb and baa -> aab."""
    return [
        _checked(RewriteRule((b, b, a), VVPolynomial.monomial((a, b, b)), "EG2")),
        _checked(RewriteRule((b, a, a), VVPolynomial.monomial((a, a, b)), "EG2")),
    ]


def fold_rule(v: int) -> RewriteRule:
    return RewriteRule((v, v), VVPolynomial.monomial((), 1, (v,)), "fold")


@dataclass
class RuleSet:
    kind: str
    ctx: VariableContext
    rules: tuple[RewriteRule, ...]
    index: dict = field(init=False, repr=False)
    lengths: tuple[int, ...] = field(init=False, repr=False)
    _memo: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown ring kind {self.kind!r}")
        self.rules = tuple(self.rules)
        self.index = {}
        for r in self.rules:
            if r.lhs in self.index:
                raise InternalError(f"duplicate leader {r.lhs}")
            self.index[r.lhs] = r
        self.lengths = tuple(sorted({len(r.lhs) for r in self.rules}))

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def find_window(self, word: Word) -> tuple[int, RewriteRule] | None:
        """Leftmost matching window; family precedence breaks ties at one position."""
        n = len(word)
        for pos in range(n):
            best = None
            for length in self.lengths:
                if pos + length > n:
                    break
                r = self.index.get(word[pos : pos + length])
                if r is not None and (best is None or r.family < best.family):
                    best = r
            if best is not None:
                return pos, best
        return None

    def has_window_ending(self, word: Word) -> bool:
        """Whether some leader is a suffix of ``word``."""
        n = len(word)
        for length in self.lengths:
            if length > n:
                break
            if word[n - length :] in self.index:
                return True
        return False

    def is_reduced(self, t: VVMonomial) -> bool:
        if self.kind == "squarefree" and not is_folded(t.left):
            return False
        return self.find_window(t.left) is None

    def admits(self, t: VVMonomial) -> bool:
        """Whether ``t`` lives in the ring this base was generated for."""
        content = t.content()
        if not self.ctx.covers(content):
            return False
        if self.kind == "multilinear":
            return not t.squares and all(c == 1 for c in content.values())
        if self.kind == "general":
            return not t.squares
        return True


def _support(ctx: VariableContext) -> list[int]:
    return [i for i, c in enumerate(ctx.counts) if c > 0]


def _fits(ctx: VariableContext, word: Iterable[int]) -> bool:
    return all(ctx.counts[v] >= c for v, c in Counter(word).items())


def generate_multilinear(ctx: VariableContext) -> RuleSet:
    vs = _support(ctx)
    if len(vs) < 3:
        raise DomainError("the multilinear base needs n >= 3")
    rules: list[RewriteRule] = []
    for a, b, c in combinations(vs, 3):
        rules += g3_rules(a, b, c)
    for j in range(4, len(vs) + 1):
        for idx in combinations(vs, j):
            rules.append(gj_rule(idx))
    return RuleSet("multilinear", ctx, tuple(rules))


def _general_index_tuples(vs: list[int], j: int, egj: bool):
    """i1 < i2 < i3, then i4 <= ... <= i_{j-1} < i_j; Gj also needs i3 < i4."""
    for i1, i2, i3 in combinations(vs, 3):
        if j == 3:
            yield (i1, i2, i3)
            continue
        for mid in combinations_with_replacement([v for v in vs if v >= i3], j - 4):
            if mid and not egj and mid[0] == i3:
                continue
            floor = mid[-1] if mid else i3
            for ij in vs:
                if ij > floor:
                    yield (i1, i2, i3, *mid, ij)


def generate_general(ctx: VariableContext, max_length: int | None = None) -> RuleSet:
    """G3, Gj, EG2, EGj restricted to the multiset of ``ctx``."""
    vs = _support(ctx)
    if len(vs) < 2:
        raise DomainError("the general base needs n >= 2")
    m = ctx.m if max_length is None else max_length
    rules: list[RewriteRule] = []
    for a, b in combinations(vs, 2):
        for r in eg2_rules(a, b):
            if _fits(ctx, r.lhs):
                rules.append(r)
    for a, b, c in combinations(vs, 3):
        if _fits(ctx, (a, b, c)):
            rules += g3_rules(a, b, c)
    for j in range(3, m + 1):
        for idx in _general_index_tuples(vs, j, egj=True):
            if j + 1 <= m and _fits(ctx, idx + (idx[2],)):
                rules.append(egj_rule(idx))
        if j >= 4:
            for idx in _general_index_tuples(vs, j, egj=False):
                if _fits(ctx, idx):
                    rules.append(gj_rule(idx))
    return RuleSet("general", ctx, tuple(rules))


def generate_squarefree(ctx: VariableContext) -> RuleSet:
    """G3, Gj and EGk with strictly increasing indices, plus folding."""
    vs = _support(ctx)
    if len(vs) < 2:
        raise DomainError("the square-free base needs n >= 2")
    rules: list[RewriteRule] = [fold_rule(v) for v in vs if ctx.counts[v] >= 2]
    for a, b, c in combinations(vs, 3):
        rules += g3_rules(a, b, c)
    for j in range(3, len(vs) + 1):
        for idx in combinations(vs, j):
            if j >= 4 and _fits(ctx, idx):
                rules.append(gj_rule(idx))
            if j + 1 <= ctx.m and _fits(ctx, idx + (idx[2],)):
                rules.append(egj_rule(idx))
    return RuleSet("squarefree", ctx, tuple(rules))


def generate(kind: str, ctx: VariableContext) -> RuleSet:
    if kind == "multilinear":
        return generate_multilinear(ctx)
    if kind == "general":
        return generate_general(ctx)
    if kind == "squarefree":
        return generate_squarefree(ctx)
    raise DomainError(f"unknown ring kind {kind!r}")


# ---------------------------------------------------------------- reduction


def migrate_squares(p: VVPolynomial, ctx: VariableContext | None = None) -> VVPolynomial:
    """Fold every adjacent equal pair into the square part."""
    acc: dict[VVMonomial, Fraction] = {}
    for m, c in p.terms.items():
        if ctx is not None:
            ctx.check(m.left + m.squares)
        k = fold(m.left, m.squares)
        acc[k] = acc.get(k, 0) + c
    return VVPolynomial(acc)


def _rewrite(t: VVMonomial, pos: int, rule: RewriteRule, squarefree: bool) -> dict[VVMonomial, Fraction]:
    w = t.left
    head, tail = w[:pos], w[pos + len(rule.lhs) :]
    out: dict[VVMonomial, Fraction] = {}
    for r, c in rule.rhs.terms.items():
        left = head + r.left + tail
        sq = tuple(sorted(t.squares + r.squares)) if r.squares else t.squares
        u = fold(left, sq) if squarefree else VVMonomial(left, sq)
        out[u] = out.get(u, 0) + c
    return {k: v for k, v in out.items() if v}


class FuelExhausted(InternalError):
    pass


def _normal_form_of(t: VVMonomial, rs: RuleSet, budget: list[int]) -> dict[VVMonomial, Fraction]:
    """Normal form of one monomial, memoized on the rule set; iterative to avoid deep recursion."""
    memo = rs._memo
    hit = memo.get(t)
    if hit is not None:
        return hit
    sf = rs.kind == "squarefree"
    succ: dict[VVMonomial, dict] = {}
    stack = [t]
    while stack:
        u = stack[-1]
        if u in memo:
            stack.pop()
            continue
        s = succ.get(u)
        if s is None:
            win = rs.find_window(u.left)
            if win is None:
                memo[u] = {u: Fraction(1)}
                stack.pop()
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise FuelExhausted("reduction fuel exhausted")
            s = succ[u] = _rewrite(u, win[0], win[1], sf)
            ku = order_key(u)
            for v in s:
                if order_key(v) >= ku:
                    raise InternalError(f"rewrite of {u} by {win[1].tag} does not lower the order")
        missing = [v for v in s if v not in memo]
        if missing:
            # every rewrite lowers the order, so the search cannot cycle
            stack.extend(missing)
            continue
        acc: dict[VVMonomial, Fraction] = {}
        for v, c in s.items():
            for x, cx in memo[v].items():
                acc[x] = acc.get(x, 0) + c * cx
        memo[u] = {k: v for k, v in acc.items() if v}
        stack.pop()
    return memo[t]


def reduce(p: VVPolynomial, rs: RuleSet, ctx: VariableContext | None = None, fuel: int | None = None) -> VVPolynomial:
    """Normal form of ``p`` with respect to the rule set."""
    budget = [default_fuel() if fuel is None else fuel]
    if rs.kind == "squarefree":
        p = migrate_squares(p, ctx)
    acc: dict[VVMonomial, Fraction] = {}
    for t, c in p.terms.items():
        if ctx is not None:
            ctx.check(t.left + t.squares)
        if not rs.admits(t):
            raise DomainError(f"monomial {t} lies outside the {rs.kind} ring over {rs.ctx.multiset}")
        for x, cx in _normal_form_of(t, rs, budget).items():
            acc[x] = acc.get(x, 0) + c * cx
    return VVPolynomial(acc)


@dataclass
class TraceStep:
    before: VVMonomial
    rule: RewriteRule
    position: int
    after: VVPolynomial


def reduce_traced(p: VVPolynomial, rs: RuleSet, fuel: int | None = None) -> tuple[VVPolynomial, list[TraceStep]]:
    """Reduce by always rewriting the highest non-reduced term; records every step."""
    budget = default_fuel() if fuel is None else fuel
    sf = rs.kind == "squarefree"
    cur = dict((migrate_squares(p) if sf else p).terms)
    steps: list[TraceStep] = []
    done: set[VVMonomial] = set()
    while True:
        pending = [t for t in cur if t not in done]
        if not pending:
            break
        t = max(pending, key=order_key)
        win = rs.find_window(t.left)
        if win is None:
            done.add(t)
            continue
        budget -= 1
        if budget < 0:
            raise FuelExhausted("reduction fuel exhausted")
        c = cur.pop(t)
        out = _rewrite(t, win[0], win[1], sf)
        for u, cu in out.items():
            v = cur.get(u, 0) + c * cu
            if v:
                cur[u] = v
            else:
                cur.pop(u, None)
        steps.append(TraceStep(t, win[1], win[0], VVPolynomial(out)))
    return VVPolynomial(cur), steps


# ------------------------------------------------------------ normal shapes


def _descent_blocks(word: Word):
    """Split at strict descents: returns positions of descent letters or None if two are adjacent."""
    zs = [i for i in range(1, len(word)) if word[i] < word[i - 1]]
    if any(b - a == 1 for a, b in zip(zs, zs[1:])):
        return None
    return zs


def _non_descending(seq: Sequence[int], strict: bool = False) -> bool:
    if strict:
        return all(a < b for a, b in zip(seq, seq[1:]))
    return all(a <= b for a, b in zip(seq, seq[1:]))


def is_normal_shape(t: VVMonomial, kind: str, ctx: VariableContext | None = None) -> bool:
    """Structural description of normal monomials for each ring kind."""
    if ctx is not None:
        ctx.check(t.left + t.squares)
    w = t.left
    if kind == "multilinear":
        if t.squares or len(set(w)) != len(w):
            return False
        zs = _descent_blocks(w)
        if zs is None:
            return False
        ys = [v for i, v in enumerate(w) if i not in set(zs)]
        return _non_descending(ys, strict=True) and _non_descending([w[i] for i in zs], strict=True)
    if kind == "general":
        if t.squares:
            return False
        zs = _descent_blocks(w)
        if zs is None:
            return False
        zset = set(zs)
        hs = [i - 1 for i in zs]
        rest = [v for i, v in enumerate(w) if i not in zset]
        if not _non_descending(rest):
            return False
        for h in hs:
            # trailing letter of Y_i must be strictly below h_i
            if h - 1 >= 0 and h - 1 not in zset and w[h - 1] == w[h]:
                return False
        return _non_descending([w[i] for i in zs]) and _non_descending([w[i] for i in hs])
    if kind == "squarefree":
        if not is_folded(w):
            return False
        zs = _descent_blocks(w)
        if zs is None:
            return False
        zset = set(zs)
        # Y blocks are strictly ascending, their concatenation non-descending
        blocks, cur = [], []
        for i, v in enumerate(w):
            if i in zset:
                blocks.append(cur)
                cur = []
            else:
                cur.append(v)
        if cur:
            blocks.append(cur)
        if not all(_non_descending(b, strict=True) for b in blocks):
            return False
        return _non_descending([v for b in blocks for v in b]) and _non_descending([w[i] for i in zs])
    raise DomainError(f"unknown ring kind {kind!r}")


def normal_monomials(content: Counter, rs: RuleSet) -> list[VVMonomial]:
    """Every reduced monomial of exactly the given content, in increasing order."""
    sf = rs.kind == "squarefree"
    out: list[VVMonomial] = []
    square_choices: list[Counter] = [Counter()]
    if sf:
        square_choices = []
        items = sorted(content.items())

        def pick(i, cur):
            if i == len(items):
                square_choices.append(Counter(cur))
                return
            v, c = items[i]
            for k in range(c // 2 + 1):
                cur[v] = k
                pick(i + 1, cur)
            cur.pop(v, None)

        pick(0, {})
    for sq in square_choices:
        rest = Counter(content)
        for v, k in sq.items():
            rest[v] -= 2 * k
        rest = +rest
        squares = tuple(sorted(v for v, k in sq.items() for _ in range(k)))
        letters = sorted(rest)
        total = sum(rest.values())
        cur: list[int] = []

        def rec():
            if len(cur) == total:
                out.append(VVMonomial(tuple(cur), squares))
                return
            for v in letters:
                if rest[v] == 0 or (sf and cur and cur[-1] == v):
                    continue
                cur.append(v)
                if not rs.has_window_ending(tuple(cur)):
                    rest[v] -= 1
                    rec()
                    rest[v] += 1
                cur.pop()

        rec()
    out.sort(key=order_key)
    return out
