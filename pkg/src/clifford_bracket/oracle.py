"""Exact evaluation in Cl(0,3) and brute-force checks used as ground truth."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Mapping, Sequence, Union

from .core import (
    BracketFactor,
    BracketPolynomial,
    DomainError,
    InternalError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    fold,
    order_key,
)
from .linalg import RankTracker

# basis order 1, e1, e2, e3, e12, e13, e23, e123 as bitmasks
MASKS = (0, 1, 2, 4, 3, 5, 6, 7)
INDEX = {m: i for i, m in enumerate(MASKS)}
GRADE = tuple(bin(m).count("1") for m in MASKS)
CONJ_SIGN = tuple((1, -1, -1, 1)[g] for g in GRADE)


def _blade_sign(a: int, b: int) -> int:
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    # every shared generator squares to -1
    swaps += bin(a & b).count("1")
    return -1 if swaps % 2 else 1


TABLE = tuple(
    tuple((INDEX[MASKS[i] ^ MASKS[j]], _blade_sign(MASKS[i], MASKS[j])) for j in range(8)) for i in range(8)
)


@dataclass(frozen=True)
class Multivector8:
    coords: tuple = (0,) * 8

    def __post_init__(self):
        if len(self.coords) != 8:
            raise ValueError("a multivector has 8 coordinates")
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def scalar(cls, c) -> "Multivector8":
        return cls((c, 0, 0, 0, 0, 0, 0, 0))

    @classmethod
    def vector(cls, x, y, z) -> "Multivector8":
        return cls((0, x, y, z, 0, 0, 0, 0))

    @classmethod
    def basis(cls, i: int) -> "Multivector8":
        c = [0] * 8
        c[i] = 1
        return cls(tuple(c))

    def __add__(self, other):
        return Multivector8(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return Multivector8(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return Multivector8(tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, Multivector8):
            return mul(self, other)
        return Multivector8(tuple(a * other for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def grade_parts(self) -> dict[int, tuple]:
        return {g: tuple(c for c, gg in zip(self.coords, GRADE) if gg == g) for g in range(4)}


E1, E2, E3 = (Multivector8.basis(i) for i in (1, 2, 3))
IOTA = Multivector8.basis(7)


def _mul_raw(a: Sequence, b: Sequence) -> list:
    out = [0] * 8
    for i, x in enumerate(a):
        if not x:
            continue
        row = TABLE[i]
        for j, y in enumerate(b):
            if y:
                k, s = row[j]
                out[k] += s * x * y
    return out


def mul(a: Multivector8, b: Multivector8) -> Multivector8:
    return Multivector8(tuple(_mul_raw(a.coords, b.coords)))


def conjugate(a: Multivector8) -> Multivector8:
    return Multivector8(tuple(s * c for s, c in zip(CONJ_SIGN, a.coords)))


@dataclass(frozen=True)
class CenterValue:
    scalar: Fraction
    pseudo: Fraction

    def as_multivector(self) -> Multivector8:
        return Multivector8((self.scalar, 0, 0, 0, 0, 0, 0, self.pseudo))


def bracket_of(a: Multivector8) -> CenterValue:
    return CenterValue(a.coords[0], a.coords[7])


Assignment = Mapping[int, tuple]


def _scaled(vec: Sequence) -> tuple[tuple[int, int, int], int]:
    fr = [Fraction(x) for x in vec]
    lam = lcm(*(f.denominator for f in fr))
    return tuple(int(f * lam) for f in fr), lam


# a * (x e1 + y e2 + z e3): for each output coordinate, (input coordinate, vector slot, sign)
_VEC_TERMS = tuple(
    tuple((i, j - 1, TABLE[i][j][1]) for i in range(8) for j in (1, 2, 3) if TABLE[i][j][0] == k)
    for k in range(8)
)


def _right_mul_vec(a: Sequence[int], v: Sequence[int]) -> tuple:
    return tuple(sum(s * a[i] * v[j] for i, j, s in terms) for terms in _VEC_TERMS)


class Evaluator:
    """Evaluates many polynomials at one fixed assignment, memoizing word values.

    Each vector is scaled to integers, words are multiplied in exact integer
    arithmetic and the product of scales is divided out once per word.
    """

    def __init__(self, assignment: Assignment):
        self.assignment = dict(assignment)
        self._vec: dict[int, tuple] = {}
        self._scale: dict[int, int] = {}
        for v, vec in self.assignment.items():
            self._vec[v], self._scale[v] = _scaled(vec)
        self._words: dict[tuple, tuple] = {(): ((1, 0, 0, 0, 0, 0, 0, 0), 1)}
        self._sq: dict[int, Fraction] = {}

    def _need(self, v: int):
        if v not in self._vec:
            raise DomainError(f"assignment misses variable {v}")

    def word_raw(self, w: tuple) -> tuple[tuple, int]:
        """(integer coordinates, denominator) of the product of the word's vectors."""
        hit = self._words.get(w)
        if hit is not None:
            return hit
        k = len(w) - 1
        while w[:k] not in self._words:
            k -= 1
        coords, den = self._words[w[:k]]
        for i in range(k, len(w)):
            v = w[i]
            if v not in self._vec:
                self._need(v)
            coords = _right_mul_vec(coords, self._vec[v])
            den *= self._scale[v]
            self._words[w[: i + 1]] = (coords, den)
        return coords, den

    def square(self, v: int) -> Fraction:
        s = self._sq.get(v)
        if s is None:
            self._need(v)
            x, y, z = (Fraction(c) for c in self.assignment[v])
            s = self._sq[v] = -(x * x + y * y + z * z)
        return s

    def squares(self, squares) -> Fraction:
        out = Fraction(1)
        for v in squares:
            out *= self.square(v)
        return out

    def word(self, w: tuple) -> list:
        coords, den = self.word_raw(tuple(w))
        return [Fraction(c, den) for c in coords]

    def center_of_word(self, w: tuple) -> tuple[Fraction, Fraction]:
        coords, den = self.word_raw(tuple(w))
        return Fraction(coords[0], den), Fraction(coords[7], den)

    def vv(self, p: VVPolynomial, center: bool = False) -> list:
        out = [Fraction(0)] * 8
        idx = (0, 7) if center else range(8)
        for mono, c in p.terms.items():
            coords, den = self.word_raw(mono.left)
            f = c * self.squares(mono.squares) / den
            for i in idx:
                if coords[i]:
                    out[i] += f * coords[i]
        return out

    def bracket_poly(self, p: BracketPolynomial, center: bool = False) -> list:
        out = [Fraction(0)] * 8
        for (atoms, squares), c in p.mapping.items():
            val = [c * self.squares(squares), 0, 0, 0, 0, 0, 0, 0]
            for a in atoms:
                if isinstance(a, BracketFactor):
                    s, ps = self.center_of_word(a.entries)
                    val = _mul_raw(val, (s, 0, 0, 0, 0, 0, 0, ps))
                else:
                    coords, den = self.word_raw((a,))
                    val = _mul_raw(val, [Fraction(x, den) for x in coords])
            for i in range(8):
                out[i] += val[i]
        if center:
            out = [out[i] if i in (0, 7) else Fraction(0) for i in range(8)]
        return out

    def __call__(self, p, center: bool = False) -> Multivector8:
        if isinstance(p, VVPolynomial):
            return Multivector8(tuple(self.vv(p, center)))
        if isinstance(p, BracketPolynomial):
            return Multivector8(tuple(self.bracket_poly(p, center)))
        raise TypeError(f"cannot evaluate {type(p).__name__}")


def eval_poly(p: Union[VVPolynomial, BracketPolynomial], asg: Assignment, center: bool = False) -> Multivector8:
    return Evaluator(asg)(p, center)


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 7))


def random_assignment(variables, rng: random.Random) -> dict[int, tuple]:
    out = {}
    for v in sorted(variables):
        vec = (0, 0, 0)
        while not any(vec):
            vec = tuple(random_rational(rng) for _ in range(3))
        out[v] = vec
    return out


def variables_of(p) -> set[int]:
    if isinstance(p, BracketPolynomial):
        return p.variables()
    out: set[int] = set()
    for m in p.terms:
        out.update(m.left)
        out.update(m.squares)
    return out


@dataclass
class ZeroCheck:
    zero: bool
    witness: dict | None = None
    value: Multivector8 | None = None

    def __bool__(self):
        return self.zero


def check_zero(p, trials: int = 20, seed: int = 0, center: bool = False, variables=None) -> ZeroCheck:
    """Randomized exact zero test; returns the first witness of non-vanishing."""
    if not p:
        return ZeroCheck(True)
    rng = random.Random(seed)
    vs = variables_of(p) if variables is None else variables
    for _ in range(trials):
        asg = random_assignment(vs, rng)
        val = Evaluator(asg)(p, center)
        if not val.is_zero():
            return ZeroCheck(False, asg, val)
    return ZeroCheck(True)


def check_zero_many(polys: Sequence, trials: int = 20, seed: int = 0, center: bool = False) -> list[int]:
    """Indices of polynomials that fail to vanish; assignments are shared across the batch."""
    rng = random.Random(seed)
    vs: set[int] = set()
    for p in polys:
        vs |= variables_of(p)
    bad: set[int] = set()
    for _ in range(trials):
        ev = Evaluator(random_assignment(vs, rng))
        for i, p in enumerate(polys):
            if i not in bad and not ev(p, center).is_zero():
                bad.add(i)
    return sorted(bad)


# ---------------------------------------------------------- closure search


@dataclass
class ClosureResult:
    reachable: frozenset
    unique: bool
    fixed_point: VVPolynomial | None
    candidates: list = field(default_factory=list)


def one_step_rewrites(mono: VVMonomial, rs) -> list[VVPolynomial]:
    """Every polynomial obtained by applying one rule at one position.

    In the square-free ring v v and □ v^2 are the same monomial, so results are
    folded and the fold rule itself never fires.
    """
    sf = rs.kind == "squarefree"
    out = []
    w = mono.left
    for length in rs.lengths:
        for pos in range(len(w) - length + 1):
            rule = rs.index.get(w[pos : pos + length])
            if rule is None or rule.tag == "fold":
                continue
            acc: dict[VVMonomial, Fraction] = {}
            for r, c in rule.rhs.terms.items():
                left = w[:pos] + r.left + w[pos + length :]
                sq = tuple(sorted(mono.squares + r.squares))
                key = fold(left, sq) if sf else VVMonomial(left, sq)
                acc[key] = acc.get(key, 0) + c
            out.append(VVPolynomial(acc))
    return out


def brute_force_closure(mono: VVMonomial, rs, ctx: VariableContext | None = None, max_degree: int = 6,
                        max_vars: int = 4, max_states: int = 200_000) -> ClosureResult:
    """Apply every rule at every position until closure and decide whether the fixed point is unique.

    For a terminating linear rewriting system, the set of fixed points reachable
    from a monomial is a singleton iff every one-step successor of every
    reachable monomial has a unique fixed point and all successors agree.
    """
    if mono.degree > max_degree:
        raise DomainError(f"degree {mono.degree} exceeds closure cap {max_degree}")
    if len(set(mono.left) | set(mono.squares)) > max_vars:
        raise DomainError(f"more than {max_vars} variables")
    if ctx is not None:
        ctx.check(mono.left + mono.squares)
    if rs.kind == "squarefree":
        mono = fold(mono.left, mono.squares)
    succ: dict[VVMonomial, list[VVPolynomial]] = {}
    todo = [mono]
    while todo:
        t = todo.pop()
        if t in succ:
            continue
        steps = one_step_rewrites(t, rs)
        succ[t] = steps
        if len(succ) > max_states:
            raise DomainError("closure state space exceeds cap")
        for p in steps:
            for u in p.terms:
                if u not in succ:
                    todo.append(u)
    # every rewrite strictly lowers the order, so process lowest first
    nf: dict[VVMonomial, VVPolynomial | None] = {}
    cands: dict[VVMonomial, list] = {}
    for t in sorted(succ, key=order_key):
        steps = succ[t]
        if not steps:
            nf[t] = VVPolynomial.monomial(t.left, 1, t.squares)
            continue
        results = []
        ok = True
        for p in steps:
            acc = VVPolynomial()
            for u, c in p.terms.items():
                if order_key(u) >= order_key(t):
                    raise InternalError(f"rewrite of {t} does not lower the order")
                sub = nf[u]
                if sub is None:
                    ok = False
                    break
                acc = acc + sub.scale(c)
            if not ok:
                break
            results.append(acc)
        if ok and all(r == results[0] for r in results):
            nf[t] = results[0]
        else:
            nf[t] = None
            cands[t] = results
    top = nf[mono]
    return ClosureResult(frozenset(succ), top is not None, top, cands.get(mono, []))


# -------------------------------------------------------- dimension checks


def words_of_content(content: Counter) -> list[tuple]:
    """All distinct arrangements of a multiset, in lex order."""
    items = sorted(content.items())
    out: list[tuple] = []
    total = sum(content.values())
    counts = [c for _, c in items]
    cur: list[int] = []

    def rec():
        if len(cur) == total:
            out.append(tuple(cur))
            return
        for i, (v, _) in enumerate(items):
            if counts[i]:
                counts[i] -= 1
                cur.append(v)
                rec()
                cur.pop()
                counts[i] += 1

    rec()
    return out


def sub_contents(bound: Counter, degree: int) -> list[Counter]:
    """Sub-multisets of ``bound`` of the given size."""
    items = sorted(bound.items())
    out = []
    for choice in product(*(range(c + 1) for _, c in items)):
        if sum(choice) == degree:
            out.append(Counter({v: k for (v, _), k in zip(items, choice) if k}))
    return out


def _ideal_generators(letters) -> list[dict]:
    """V2, V3, V4 over every choice of letters."""
    gens = []
    for i, j in product(letters, repeat=2):
        gens.append([((i, i, j), 1), ((j, i, i), -1)])
    for i, j, k in product(letters, repeat=3):
        gens.append([((i, j, k), 1), ((j, i, k), 1), ((k, i, j), -1), ((k, j, i), -1)])
    for i, j, k, l in product(letters, repeat=4):
        gens.append([((i, j, k, l), 1), ((k, j, i, l), -1), ((l, i, j, k), -1), ((l, k, j, i), 1)])
    out = []
    for g in gens:
        acc: dict = {}
        for w, c in g:
            acc[w] = acc.get(w, 0) + c
        acc = {w: c for w, c in acc.items() if c}
        if acc:
            out.append(acc)
    return out


def ideal_span_dimension(content: Counter) -> tuple[int, int]:
    """(number of words, rank of the syzygy ideal) in the component of the given content."""
    words = words_of_content(content)
    index = {w: i for i, w in enumerate(words)}
    tracker = RankTracker()
    for g in _ideal_generators(sorted(content)):
        gc = Counter(next(iter(g)))
        if any(gc[v] > content[v] for v in gc):
            continue
        rest = content - gc
        for w in words_of_content(rest):
            for cut in range(len(w) + 1):
                row: dict = {}
                for gw, c in g.items():
                    j = index[w[:cut] + gw + w[cut:]]
                    row[j] = row.get(j, 0) + c
                tracker.add({k: v for k, v in row.items() if v})
    return len(words), tracker.rank


def quotient_dimension(m: int, ctx: VariableContext, kind: str = "general", method: str = "ideal") -> int:
    """Dimension of the degree-m component of the vector-variable quotient over ctx's multiset.

    ``method="ideal"`` spans the V2/V3/V4 generators and takes a rank;
    ``method="eval"`` takes the rank of word values at random points. The
    square-free ring is isomorphic to the general one, so ``kind`` only checks validity.
    """
    if kind not in ("multilinear", "general", "squarefree"):
        raise DomainError(f"unknown ring kind {kind!r}")
    if m > 6:
        raise DomainError("quotient_dimension is capped at degree 6")
    if m == 0:
        return 1
    total = 0
    for content in sub_contents(ctx.content(), m):
        if method == "ideal":
            nwords, rank = ideal_span_dimension(content)
            total += nwords - rank
        else:
            total += evaluation_rank([VVMonomial(w) for w in words_of_content(content)])
    return total


def evaluation_rank(monos: Sequence[VVMonomial], center: bool = False, seed: int = 7) -> int:
    return len(independent_by_evaluation(monos, center=center, seed=seed))


def independent_by_evaluation(monos: Sequence[VVMonomial], center: bool = False, seed: int = 7,
                              points: int | None = None) -> list[VVMonomial]:
    """Greedy independent subset, scanning ``monos`` in the given order.

    A monomial is kept iff its value vector over the sample points is not in the
    span of earlier ones. Enough points are drawn to make the sampled rank equal
    to the true rank with overwhelming probability; extra points are added until
    the rank stabilizes.
    """
    if not monos:
        return []
    vs = {v for m in monos for v in m.left + m.squares}
    rng = random.Random(seed)
    comps = (0, 7) if center else range(8)
    npts = points or max(4, len(monos) // len(comps) + 3)

    def values(n):
        evs = [Evaluator(random_assignment(vs, rng)) for _ in range(n)]
        cols = []
        for mono in monos:
            row = []
            for ev in evs:
                coords, den = ev.word_raw(mono.left)
                sq = ev.squares(mono.squares)
                row.extend(sq * Fraction(coords[i], den) for i in comps)
            cols.append(row)
        return cols

    cols = values(npts)
    while True:
        tracker = RankTracker()
        kept = [m for m, col in zip(monos, cols) if tracker.add(dict(enumerate(col)))]
        more = values(3)
        cols = [a + b for a, b in zip(cols, more)]
        tracker2 = RankTracker()
        kept2 = [m for m, col in zip(monos, cols) if tracker2.add(dict(enumerate(col)))]
        if kept2 == kept:
            return kept
