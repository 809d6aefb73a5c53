"""Bracket-level normalization: Caianiello expansion, the rewrite formulas and straightening.

Every formula below is a universal identity of the Clifford bracket algebra;
the wrappers with side conditions are the forms the rewrite strategy applies
at the leftmost reducible window of a canonical term's leader.
"""
from __future__ import annotations

import functools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .core import (
    BracketFactor,
    BracketPolynomial,
    BracketTerm,
    DomainError,
    InternalError,
    Tableau,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    Word,
    expand_term,
    fold,
    merge_squares,
    order_key,
)
from .gbasis import FuelExhausted, RuleSet, default_fuel, reduce
from .oracle import check_zero_many
from .unibracket import squarefree_rules

HALF = Fraction(1, 2)
STRATEGIES = ("leader", "rewrite")
ORIENTATIONS = ("leader", "straight")


def _sgn(k: int) -> int:
    return -1 if k % 2 else 1


def _br(*parts) -> BracketFactor:
    return BracketFactor(tuple(v for p in parts for v in ((p,) if isinstance(p, int) else p)))


def _t(coef, *atoms) -> BracketPolynomial:
    return BracketPolynomial.term(coef, atoms)


def _rev(w: Word) -> Word:
    return tuple(reversed(w))


# ------------------------------------------------------ canonical brackets


def cyclic_fold(entries: Sequence[int]) -> tuple[Word, Word]:
    """Pull squares out of a bracket: [A v v B] = v^2 [A B], [v A v] = v^2 [A]."""
    m = fold(entries)
    w, sq = list(m.left), list(m.squares)
    while len(w) >= 2 and w[0] == w[-1]:
        sq.append(w[0])
        m = fold(w[1:-1])
        w = list(m.left)
        sq += m.squares
    return tuple(w), tuple(sorted(sq))


def canonical_bracket(entries: Sequence[int]) -> tuple[int, Word, Word] | None:
    """(sign, representative, squares) with the lowest leader among dihedral images.

    Returns None when the bracket vanishes (length one, or a symmetry with
    conflicting signs).
    """
    w, sq = cyclic_fold(entries)
    a = len(w)
    if a == 1:
        return None
    if a == 0:
        return 1, (), sq
    rs = _sgn(a)
    images: dict[Word, int] = {}
    r = _rev(w)
    for i in range(a):
        for z, s in ((w[i:] + w[:i], 1), (r[i:] + r[:i], rs)):
            prev = images.setdefault(z, s)
            if prev != s:
                return None
    best = min(z for z in images if z >= _rev(z))
    return images[best], best, sq


def _concat_cmp(x: Word, y: Word) -> int:
    a, b = x + y, y + x
    return (a > b) - (a < b)


_CONCAT_KEY = functools.cmp_to_key(_concat_cmp)


def canonical_term(atoms: Sequence, squares: Sequence[int] = ()) -> tuple[int, tuple, Word] | None:
    """Canonical brackets sorted so that the concatenated leader is least."""
    sign = 1
    reps: list[Word] = []
    sq = list(squares)
    for a in atoms:
        if not isinstance(a, BracketFactor):
            raise DomainError("straightening needs terms made of brackets only")
        c = canonical_bracket(a.entries)
        if c is None:
            return None
        s, rep, extra = c
        sign *= s
        sq += extra
        if rep:
            reps.append(rep)
    reps.sort(key=_CONCAT_KEY)
    return sign, tuple(BracketFactor(r) for r in reps), tuple(sorted(sq))


def canonicalize(p: BracketPolynomial) -> BracketPolynomial:
    acc: dict = {}
    for (atoms, squares), c in p.mapping.items():
        ct = canonical_term(atoms, squares)
        if ct is None:
            continue
        s, at, sq = ct
        acc[(at, sq)] = acc.get((at, sq), 0) + s * c
    return BracketPolynomial(acc)


def leader_of(atoms: Sequence[BracketFactor], squares: Word = ()) -> VVMonomial:
    """Leader of a canonical bracket monomial: the concatenated representatives."""
    return fold(tuple(v for a in atoms for v in a.entries), squares)


# ------------------------------------------------------ Caianiello expansion


def _perm_sign(seq: Sequence[int]) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def default_partition(length: int) -> list[int]:
    if length < 2:
        raise DomainError("brackets of length < 2 have no expansion")
    return [2] * (length // 2) if length % 2 == 0 else [2] * ((length - 3) // 2) + [3]


def caianiello_expand(f: BracketFactor | Sequence[int], partition: Sequence[int] | None = None) -> BracketPolynomial:
    """Expand a long bracket into brackets whose lengths form ``partition``.

    Even length peels a 2-bracket off the first entry, odd length peels a
    3-bracket, each carrying the sign of the induced permutation.
    """
    entries = f.entries if isinstance(f, BracketFactor) else tuple(f)
    parts = list(default_partition(len(entries)) if partition is None else partition)
    if any(p < 2 for p in parts) or sum(parts) != len(entries):
        raise DomainError(f"invalid partition {parts} for a bracket of length {len(entries)}")
    out = _caianiello(tuple(range(len(entries))), Counter(parts))
    if out is None:
        raise DomainError(f"partition {parts} is not reachable by the Caianiello formulas")
    # substitute positions by entries
    acc: dict = {}
    for (atoms, sq), c in out.mapping.items():
        key = (tuple(BracketFactor(tuple(entries[i] for i in a.entries)) for a in atoms), sq)
        acc[key] = acc.get(key, 0) + c
    return BracketPolynomial(acc)


def _caianiello(pos: Word, parts: Counter) -> BracketPolynomial | None:
    n = len(pos)
    if sum(parts.values()) == 1 and parts[n] == 1:
        return BracketPolynomial.bracket(pos)
    if n % 2 == 0:
        if not parts[2]:
            return None
        rest_parts = parts - Counter({2: 1})
        out = BracketPolynomial()
        for i in range(1, n):
            rest = pos[1:i] + pos[i + 1 :]
            sub = _caianiello(rest, rest_parts)
            if sub is None:
                return None
            out = out + (BracketPolynomial.bracket((pos[0], pos[i])) * sub).scale(_sgn(i + 1))
        return out
    if not parts[3]:
        return None
    rest_parts = parts - Counter({3: 1})
    out = BracketPolynomial()
    for trio in combinations(range(n), 3):
        first = tuple(pos[i] for i in range(n) if i not in trio)
        second = tuple(pos[i] for i in trio)
        sign = _perm_sign(first + second)
        sub = _caianiello(first, rest_parts) if first else BracketPolynomial.constant(1)
        if sub is None:
            return None
        out = out + (sub * BracketPolynomial.bracket(second)).scale(sign)
    return out


# ----------------------------------------------------------- raw identities
# Each returns the right-hand side; the left-hand side is noted in the docstring.


def fundamental_rhs(u: int, d: Word, v: int) -> BracketPolynomial:
    """u D v = 2 uv[D] + 2 v[uD] - D u v."""
    return _t(2, u, v, _br(d)) + _t(2, v, _br(u, d)) - _t(1, *d, u, v)


def bracket_reduction_rhs(c: Word, u: int, d: Word, v: int, e: Word) -> BracketPolynomial:
    """[C u D v E] = 2[CuvE][D] + 2[CvE][uD] - [CDuvE]."""
    return _t(2, _br(c, u, v, e), _br(d)) + _t(2, _br(c, v, e), _br(u, d)) - _t(1, _br(c, d, u, v, e))


def absorb_rhs(b: Word, u: int, v: int, w: int, c: Word, d: int) -> BracketPolynomial:
    """[B u v][w C d] = 1/2 [B w C d u v] + (-1)^c 1/2 [B d C† w u v]."""
    return _t(HALF, _br(b, w, c, d, u, v)) + _t(HALF * _sgn(len(c)), _br(b, d, _rev(c), w, u, v))


def shuffle_rhs(a: Word, v: int, b: Word, w: int, c: Word) -> BracketPolynomial:
    """[A v][B w C] as five brackets products."""
    s = _sgn(len(b))
    return (
        _t(1, _br(a, w, c, v), _br(b))
        - _t(s, _br(a, w, _rev(b), v), _br(c))
        - _t(s, _br(w, c, v), _br(a, _rev(b)))
        + _t(s, _br(w, _rev(b), v), _br(a, c))
        - _t(1, _br(a, w), _br(c, v, b))
    )


def general_shuffle_rhs(a: Word, v: int, d: Word, b: Word, w: int, c: Word) -> BracketPolynomial:
    """[A v D][B w C] as six bracket products."""
    nb, nc, nd = len(b), len(c), len(d)
    return (
        _t(1, _br(v, d, b, w), _br(a, c))
        - _t(_sgn(nb + nc), _br(v, d, _rev(c), w), _br(a, _rev(b)))
        - _t(_sgn(nd), _br(a, w), _br(_rev(d), v, b, c))
        - _t(1, _br(v, d), _br(a, w, b, c))
        - _t(_sgn(nb), _br(a, w, _rev(b), v, d), _br(c))
        + _t(1, _br(a, w, c, v, d), _br(b))
    )


def split_rhs(blocks: Sequence[Word]) -> BracketPolynomial:
    """[X a_k B_k c_k] = 2[X][a_k B_k c_k] - (-1)^{b_k} [c_k B_k† a_k X], applied recursively to X."""
    blocks = [tuple(b) for b in blocks]
    if len(blocks) < 2:
        raise DomainError("split needs at least two blocks")
    last = blocks[-1]
    x = tuple(v for blk in blocks[:-1] for v in blk)
    bk = len(last) - 2
    head = split_rhs(blocks[:-1]) if len(blocks) > 2 else BracketPolynomial.bracket(x)
    return (head * BracketPolynomial.bracket(last)).scale(2) - _t(_sgn(bk), _br(_rev(last), x))


def igp(v: Sequence[int]) -> BracketPolynomial:
    """[12][345] - [13][245] + [14][235] - [15][234], zero in dimension three."""
    v1, v2, v3, v4, v5 = v
    return (
        _t(1, _br(v1, v2), _br(v3, v4, v5))
        - _t(1, _br(v1, v3), _br(v2, v4, v5))
        + _t(1, _br(v1, v4), _br(v2, v3, v5))
        - _t(1, _br(v1, v5), _br(v2, v3, v4))
    )


def db(v: Sequence[int]) -> BracketPolynomial:
    """[123][456] + det([v_i v_j]), zero in dimension three."""
    rows, cols = v[:3], v[3:]
    out = _t(1, _br(rows), _br(cols))
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        sign = _perm_sign(perm)
        out = out + _t(sign, *(_br(rows[i], cols[perm[i]]) for i in range(3)))
    return out


def new_reduction_first(a: Word, b: Word) -> BracketPolynomial:
    """(AB + BA)/2 - [AB] - (-1)^b (A[B†] - [A]B†)."""
    s = _sgn(len(b))
    return (
        _t(HALF, *a, *b) + _t(HALF, *b, *a) - _t(1, _br(a, b))
        - _t(s, *a, _br(_rev(b))) + _t(s, _br(a), *_rev(b))
    )


def new_reduction_second(a: Word, b: Word) -> BracketPolynomial:
    """(AB - (-1)^{a+b} A†B†)/2 - (-1)^a ([A†]B - A†[B])."""
    s = _sgn(len(a))
    return (
        _t(HALF, *a, *b) - _t(HALF * _sgn(len(a) + len(b)), *_rev(a), *_rev(b))
        - _t(s, _br(_rev(a)), *b) + _t(s, *_rev(a), _br(b))
    )


def shuffle_basic(v: int, b: Word, w: int, c: Word) -> BracketPolynomial:
    """v[BwC] + w[CvB] - (-1)^b (wCv[B†] - [wCv]B† - wB†v[C] + [wB†v]C)."""
    s = _sgn(len(b))
    rb = _rev(b)
    return (
        _t(1, v, _br(b, w, c)) + _t(1, w, _br(c, v, b))
        - _t(s, w, *c, v, _br(rb)) + _t(s, _br(w, c, v), *rb)
        + _t(s, w, *rb, v, _br(c)) - _t(s, _br(w, rb, v), *c)
    )


def lhs_term(*atoms) -> BracketPolynomial:
    return _t(1, *atoms)


# --------------------------------------------------- guarded rewrite forms


def fundamental_reduction(u: int, d: Sequence[int], v: int) -> BracketPolynomial:
    """RHS of u D v under the conditions u > v, u > l_D and l_D > v when |D| > 1."""
    d = tuple(d)
    if not d:
        raise DomainError("D must be non-empty")
    if not (u > v and u > d[0] and (len(d) == 1 or d[0] > v)):
        raise DomainError(f"fundamental reduction does not apply to {u}, {d}, {v}")
    return fundamental_rhs(u, d, v)


def _leader_window(word: Word, rs: RuleSet) -> tuple[int, int] | None:
    """(start, length) of the leftmost reducible window of ``word``."""
    win = rs.find_window(word)
    if win is None:
        return None
    pos, rule = win
    return pos, len(rule.lhs)


def _rules_for(word: Sequence[int]) -> RuleSet:
    c = Counter(word)
    size = max(c, default=-1) + 1
    return _rules(tuple(c.get(i, 0) for i in range(size)))


@lru_cache(maxsize=512)
def _rules(counts: tuple[int, ...]) -> RuleSet:
    return squarefree_rules(VariableContext(tuple(f"x{i}" for i in range(len(counts))), counts))


def interior_normalize(f: BracketFactor, rs: RuleSet | None = None) -> BracketPolynomial:
    """Apply the bracket reduction to the leftmost reducible window of the leader of ``f``."""
    lead, sign = f.leader()
    rs = rs or _rules_for(lead)
    win = _leader_window(lead, rs)
    if win is None or win[1] < 3:
        return BracketPolynomial.bracket(f.entries)
    pos, n = win
    c, x, e = lead[:pos], lead[pos : pos + n], lead[pos + n :]
    return bracket_reduction_rhs(c, x[0], x[1:-1], x[-1], e).scale(sign)


def absorb(first: BracketFactor, second: BracketFactor) -> BracketPolynomial:
    """[B u v][w C d] with u > v and u > w > d."""
    f, g = first.entries, second.entries
    if len(f) < 2 or len(g) < 2:
        raise DomainError("absorption needs two brackets of length >= 2")
    b, u, v = f[:-2], f[-2], f[-1]
    w, c, d = g[0], g[1:-1], g[-1]
    if not (u > v and u > w > d):
        raise DomainError("absorption needs u > v and u > w > d")
    return absorb_rhs(b, u, v, w, c, d)


def shuffle(first: BracketFactor, second: BracketFactor, b_len: int | None = None) -> BracketPolynomial:
    """[A v][B w C] with B = a D ascending and a > u > v > w (u the last letter of A)."""
    f, g = first.entries, second.entries
    if len(f) < 2:
        raise DomainError("shuffle needs |A| >= 1")
    a, v = f[:-1], f[-1]
    if b_len is None:
        b_len = 1
        while b_len < len(g) and g[b_len] > g[b_len - 1]:
            b_len += 1
    if not 1 <= b_len < len(g):
        raise DomainError("shuffle needs a non-empty B followed by w")
    b, w, c = g[:b_len], g[b_len], g[b_len + 1 :]
    u = a[-1]
    if not (all(x < y for x, y in zip(b, b[1:])) and b[0] > u > v > w):
        raise DomainError("shuffle needs B ascending and a > u > v > w")
    return shuffle_rhs(a, v, b, w, c)


def general_shuffle(first: BracketFactor, second: BracketFactor, a_len: int, b_len: int) -> BracketPolynomial:
    """[A v D][B w C] with l_A <= l_B, l_A > t_D, l_B > t_C and l_A > v > w."""
    f, g = first.entries, second.entries
    if not (1 <= a_len < len(f) and 1 <= b_len < len(g)):
        raise DomainError("general shuffle needs non-empty A and B")
    a, v, d = f[:a_len], f[a_len], f[a_len + 1 :]
    b, w, c = g[:b_len], g[b_len], g[b_len + 1 :]
    ok = a[0] <= b[0] and a[0] > v > w and (not d or a[0] > d[-1]) and (not c or b[0] > c[-1])
    if not ok:
        raise DomainError("general shuffle ordering conditions fail")
    return general_shuffle_rhs(a, v, d, b, w, c)


def descent_blocks(word: Word) -> list[Word]:
    """Cut after every letter that is followed by a higher one and preceded by a descent."""
    blocks, cur = [], []
    for i, x in enumerate(word):
        cur.append(x)
        if i + 1 < len(word) and len(cur) >= 2 and cur[-1] < cur[-2] and word[i + 1] > x:
            blocks.append(tuple(cur))
            cur = []
    blocks.append(tuple(cur))
    return blocks


def split(f: BracketFactor, blocks: Sequence[Sequence[int]] | None = None) -> BracketPolynomial:
    """Split [a1 B1 c1 ... ak Bk ck] with a_i > c_i and a_1 > c_j."""
    blocks = [tuple(b) for b in blocks] if blocks is not None else descent_blocks(f.entries)
    if tuple(v for b in blocks for v in b) != f.entries:
        raise DomainError("blocks do not concatenate to the bracket")
    if len(blocks) < 2 or any(len(b) < 2 for b in blocks):
        raise DomainError("no valid decomposition into blocks")
    a1 = blocks[0][0]
    if not all(b[0] > b[-1] and a1 > b[-1] for b in blocks):
        raise DomainError("split needs a_i > c_i and a_1 > c_j")
    return split_rhs(blocks)


# ------------------------------------------------------------ straight form


def _parse_leader(word: Word) -> list[Word] | None:
    """Cut an I□-normal word into blocks Y z with Y ascending and z < first(Y)."""
    blocks: list[Word] = []
    cur: list[int] = []
    for x in word:
        if cur and x < cur[-1]:
            if x >= cur[0]:
                return None
            blocks.append(tuple(cur) + (x,))
            cur = []
        else:
            cur.append(x)
    if cur:
        return None
    return blocks


def is_straight(t: BracketTerm | tuple, ctx: VariableContext | None = None) -> bool:
    """Tableau conditions with rows z_i Y_i; each bracket may be written [zY] or [Yz]."""
    atoms = t.atoms if isinstance(t, BracketTerm) else t
    try:
        rows = to_tableau(atoms).rows
    except DomainError:
        return False
    if ctx is not None:
        ctx.check(v for r in rows for v in r)
    for r1, r2 in zip(rows, rows[1:]):
        if r1[0] > r2[0] or r1[-1] > r2[1]:
            return False
    return True


def _row(entries: Word) -> Word:
    if len(entries) < 2:
        raise DomainError("rows need length >= 2")
    if all(x < y for x, y in zip(entries, entries[1:])):
        return entries
    rot = (entries[-1],) + entries[:-1]
    if all(x < y for x, y in zip(rot, rot[1:])):
        return rot
    raise DomainError(f"bracket {entries} is neither [zY] nor [Yz] shaped")


def to_tableau(t: BracketTerm | Sequence) -> Tableau:
    atoms = t.atoms if isinstance(t, BracketTerm) else t
    if any(not isinstance(a, BracketFactor) for a in atoms):
        raise DomainError("tableaux hold bracket factors only")
    return Tableau(tuple(_row(a.entries) for a in atoms))


def _orient(blocks: Sequence[Word], orientation: str) -> tuple[BracketFactor, ...]:
    if orientation == "straight":
        return tuple(BracketFactor((b[-1],) + b[:-1]) for b in blocks)
    return tuple(BracketFactor(b) for b in blocks)


# ------------------------------------------------------------- the engine


@dataclass
class TraceEntry:
    rule: str
    before: BracketTerm
    after: BracketPolynomial


@dataclass
class StraightenResult:
    polynomial: BracketPolynomial
    trace: list[TraceEntry] = field(default_factory=list)
    fallbacks: int = 0


class _Engine:
    def __init__(self, rs: RuleSet, fuel: int):
        self.rs = rs
        self.budget = [fuel]
        self._nf: dict = {}

    def tick(self):
        self.budget[0] -= 1
        if self.budget[0] < 0:
            raise FuelExhausted("straightening fuel exhausted")

    def nf(self, atoms, squares) -> dict[VVMonomial, Fraction]:
        """I□-normal form of a bracket monomial's expansion, memoized."""
        key = (atoms, squares)
        hit = self._nf.get(key)
        if hit is None:
            vv = VVPolynomial({VVMonomial(w, squares): c for w, c in expand_term(atoms).items()})
            hit = self._nf[key] = dict(reduce(vv, self.rs, fuel=self.budget[0]).terms)
        return hit

    def nf_poly(self, p: BracketPolynomial) -> dict[VVMonomial, Fraction]:
        acc: dict[VVMonomial, Fraction] = {}
        for (atoms, sq), c in p.mapping.items():
            for m, cm in self.nf(atoms, sq).items():
                acc[m] = acc.get(m, 0) + c * cm
        return {k: v for k, v in acc.items() if v}

    def by_leader(self, p: BracketPolynomial, trace: list | None) -> BracketPolynomial:
        """Peel off the I□-normal leading term until nothing is left."""
        cur = self.nf_poly(p)
        out: dict = {}
        while cur:
            self.tick()
            t = max(cur, key=order_key)
            c = cur[t]
            blocks = _parse_leader(t.left)
            if blocks is None:
                raise InternalError(f"leading term {t} is not the leader of a bracket monomial")
            atoms = tuple(BracketFactor(b) for b in blocks)
            coef = c * 2 ** len(blocks)
            out[(atoms, t.squares)] = out.get((atoms, t.squares), 0) + coef
            for m, cm in self.nf(atoms, t.squares).items():
                v = cur.get(m, 0) - coef * cm
                if v:
                    cur[m] = v
                else:
                    cur.pop(m, None)
            if trace is not None:
                trace.append(TraceEntry("emit", BracketTerm(coef, atoms, t.squares), BracketPolynomial()))
        return BracketPolynomial(out)

    # --- formula-driven rewriting
    def step(self, atoms: tuple, squares: Word) -> tuple[str, BracketPolynomial] | None:
        """One formula application to a canonical monomial that is not yet final."""
        lead = leader_of(atoms, squares)
        word = lead.left
        win = _leader_window(word, self.rs)
        if win is None:
            for i, a in enumerate(atoms):
                blocks = _parse_leader(a.entries)
                if blocks is not None and len(blocks) > 1:
                    rhs = split(a, blocks)
                    return "split", _embed(atoms, i, 1, rhs, squares)
            return None
        pos, n = win
        bounds, acc = [], 0
        for a in atoms:
            bounds.append((acc, acc + a.length))
            acc += a.length
        first = next(i for i, (s, e) in enumerate(bounds) if s <= pos < e)
        last = next(i for i, (s, e) in enumerate(bounds) if s < pos + n <= e)
        s0 = bounds[first][0]
        if first == last and n >= 3:
            f = atoms[first].entries
            lo, hi = pos - s0, pos - s0 + n
            x = f[lo:hi]
            rhs = bracket_reduction_rhs(f[:lo], x[0], x[1:-1], x[-1], f[hi:])
            return "bracket:reduction", _embed(atoms, first, 1, rhs, squares)
        if last == first + 1 and bounds[first][1] - pos == 2:
            f, g = atoms[first], atoms[last]
            inside = pos + n - bounds[last][0]
            try:
                if n == 3:
                    return "absorb", _embed(atoms, first, 2, absorb(f, g), squares)
                return "shuffle", _embed(atoms, first, 2, shuffle(f, g, inside - 1), squares)
            except DomainError:
                return None
        return None

    def by_rewriting(self, p: BracketPolynomial, trace: list | None) -> tuple[BracketPolynomial, int]:
        cur = {k: v for k, v in canonicalize(p).mapping.items()}
        out = BracketPolynomial()
        fallbacks = 0
        while cur:
            self.tick()
            keyed = {k: order_key(leader_of(*k)) for k in cur}
            top = max(keyed.values())
            group = [k for k, o in keyed.items() if o == top]
            pending = [k for k in group if not self._final(*k)]
            if not pending:
                (k,) = group
                out = out + BracketPolynomial({k: cur.pop(k)})
                continue
            k = min(pending, key=lambda k: len(k[0]))
            c = cur.pop(k)
            res = self.step(*k)
            ok = res is not None
            if ok:
                name, rhs = res
                rhs = canonicalize(rhs)
                for (at, sq) in rhs.mapping:
                    o = order_key(leader_of(at, sq))
                    if o > top or (o == top and len(at) <= len(k[0])):
                        ok = False
                        break
            if not ok:
                fallbacks += 1
                name, rhs = "fallback", self.by_leader(BracketPolynomial({k: 1}), None)
            if trace is not None:
                trace.append(TraceEntry(name, BracketTerm(c, *k), rhs.scale(c)))
            for kk, vv in rhs.mapping.items():
                v = cur.get(kk, 0) + c * vv
                if v:
                    cur[kk] = v
                else:
                    cur.pop(kk, None)
        return out, fallbacks

    def _final(self, atoms, squares) -> bool:
        word = leader_of(atoms, squares).left
        if self.rs.find_window(word) is not None:
            return False
        return all((b := _parse_leader(a.entries)) is not None and len(b) == 1 for a in atoms)


def _embed(atoms: tuple, i: int, width: int, rhs: BracketPolynomial, squares: Word) -> BracketPolynomial:
    """Replace atoms[i:i+width] by ``rhs`` inside the monomial."""
    before, after = atoms[:i], atoms[i + width :]
    acc: dict = {}
    for (at, sq), c in rhs.mapping.items():
        key = (before + at + after, merge_squares(squares, sq))
        acc[key] = acc.get(key, 0) + c
    return BracketPolynomial(acc)


def _context_for(p: BracketPolynomial, ctx: VariableContext | None) -> RuleSet:
    bound = p.content_bound()
    if ctx is not None:
        if not ctx.covers(bound):
            ctx = ctx.with_counts([max(c, bound.get(i, 0)) for i, c in enumerate(ctx.counts)])
        return _rules(ctx.counts)
    size = max(bound, default=-1) + 1
    return _rules(tuple(bound.get(i, 0) for i in range(size)))


def straighten(
    p: BracketPolynomial,
    ctx: VariableContext | None = None,
    strategy: str = "leader",
    orientation: str = "leader",
    trace: bool = False,
    fuel: int | None = None,
) -> BracketPolynomial | StraightenResult:
    """Leader-normal form of a bracket polynomial (terms [Y1 z1]...[Yk zk] □ s).

    ``orientation="straight"`` rotates every bracket to [z Y], the tableau
    reading. With ``trace=True`` a StraightenResult with the derivation is
    returned instead of the bare polynomial.
    """
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if orientation not in ORIENTATIONS:
        raise DomainError(f"unknown orientation {orientation!r}; expected one of {ORIENTATIONS}")
    for (atoms, _), _c in p.mapping.items():
        if any(not isinstance(a, BracketFactor) for a in atoms):
            raise DomainError("straightening needs terms made of brackets only")
    if ctx is not None:
        ctx.check(p.variables())
    eng = _Engine(_context_for(p, ctx), default_fuel() if fuel is None else fuel)
    log: list[TraceEntry] | None = [] if trace else None
    fallbacks = 0
    if strategy == "leader":
        out = eng.by_leader(p, log)
    else:
        out, fallbacks = eng.by_rewriting(p, log)
    if orientation == "straight":
        out = BracketPolynomial(
            {(_orient([a.entries for a in atoms], "straight"), sq): c for (atoms, sq), c in out.mapping.items()}
        )
    if trace:
        return StraightenResult(out, log or [], fallbacks)
    return out


def leader_normal_form(p: BracketPolynomial, ctx: VariableContext | None = None) -> BracketPolynomial:
    return straighten(p, ctx)


# ----------------------------------------------------------- identity suite


@dataclass
class IdentityReport:
    name: str
    instances: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def identity_instances(rng, count: int, max_len: int = 2, n: int = 6) -> dict[str, list[BracketPolynomial]]:
    """Random instances (LHS - RHS) of every identity, words of length <= ``max_len``."""
    def word(lo=0):
        return tuple(rng.randrange(n) for _ in range(rng.randint(lo, max_len)))

    def var():
        return rng.randrange(n)

    out: dict[str, list[BracketPolynomial]] = {k: [] for k in (
        "IGP", "DB", "new:reduction:1", "new:reduction:2", "shuffle:basic", "shuffle",
        "prop:generalf", "split:2", "split:3", "case:g31", "g:reduction", "bracket:reduction")}
    for _ in range(count):
        out["IGP"].append(igp([var() for _ in range(5)]))
        out["DB"].append(db([var() for _ in range(6)]))
        out["new:reduction:1"].append(new_reduction_first(word(1), word(1)))
        out["new:reduction:2"].append(new_reduction_second(word(1), word(1)))
        out["shuffle:basic"].append(shuffle_basic(var(), word(), var(), word()))
        a, v, b, w, c = word(1), var(), word(), var(), word()
        out["shuffle"].append(lhs_term(_br(a, v), _br(b, w, c)) - shuffle_rhs(a, v, b, w, c))
        a, v, d, b, w, c = word(1), var(), word(), word(1), var(), word()
        out["prop:generalf"].append(lhs_term(_br(a, v, d), _br(b, w, c)) - general_shuffle_rhs(a, v, d, b, w, c))
        for k in (2, 3):
            blocks = [(var(),) + word() + (var(),) for _ in range(k)]
            long = tuple(x for blk in blocks for x in blk)
            out[f"split:{k}"].append(lhs_term(_br(long)) - split_rhs(blocks))
        b, u, v, w, c, d = word(), var(), var(), var(), word(), var()
        out["case:g31"].append(lhs_term(_br(b, u, v), _br(w, c, d)) - absorb_rhs(b, u, v, w, c, d))
        u, d, v = var(), word(1), var()
        out["g:reduction"].append(lhs_term(u, *d, v) - fundamental_rhs(u, d, v))
        c, u, d, v, e = word(), var(), word(), var(), word()
        out["bracket:reduction"].append(lhs_term(_br(c, u, d, v, e)) - bracket_reduction_rhs(c, u, d, v, e))
    return out


def check_basic_identities(
    ctx: VariableContext | None = None, count: int = 30, trials: int = 20, seed: int = 0, max_len: int = 2
) -> list[IdentityReport]:
    """Instantiate every identity on random shapes and verify exact vanishing."""
    n = ctx.n if ctx is not None else 6
    rng = random.Random(seed)
    reports = []
    for name, polys in identity_instances(rng, count, max_len, n).items():
        bad = check_zero_many(polys, trials=trials, seed=seed)
        reports.append(IdentityReport(name, len(polys), [polys[i] for i in bad]))
    return reports
