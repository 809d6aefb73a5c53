"""Seeded random inputs: bracket polynomials and value-preserving scrambles."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .core import BracketFactor, BracketPolynomial, VVMonomial, VVPolynomial
from .straighten import (
    absorb_rhs,
    bracket_reduction_rhs,
    caianiello_expand,
    db,
    general_shuffle_rhs,
    igp,
    shuffle_rhs,
    split_rhs,
)


@dataclass(frozen=True)
class PolyConfig:
    n: int = 5
    max_degree: int = 8
    max_factors: int = 4
    max_terms: int = 3
    max_coef: int = 5


def random_factor(rng: random.Random, n: int, length: int) -> BracketFactor:
    return BracketFactor(tuple(rng.randrange(n) for _ in range(length)))


def random_bracket_term(rng: random.Random, n: int, degree: int, max_factors: int) -> tuple[BracketFactor, ...]:
    """Bracket factors (each of length >= 2) whose lengths sum to ``degree``."""
    k = rng.randint(1, max(1, min(max_factors, degree // 2)))
    lengths = [2] * k
    for _ in range(degree - 2 * k):
        lengths[rng.randrange(k)] += 1
    return tuple(random_factor(rng, n, L) for L in lengths)


def random_bracket_polynomial(rng: random.Random, cfg: PolyConfig = PolyConfig(), degree: int | None = None) -> BracketPolynomial:
    """Random polynomial; ``degree`` fixes every term's degree."""
    acc: dict = {}
    for _ in range(rng.randint(1, cfg.max_terms)):
        d = degree if degree is not None else rng.randint(2, cfg.max_degree)
        atoms = random_bracket_term(rng, cfg.n, d, cfg.max_factors)
        c = rng.choice([x for x in range(-cfg.max_coef, cfg.max_coef + 1) if x])
        acc[(atoms, ())] = acc.get((atoms, ()), 0) + c
    return BracketPolynomial(acc)


def random_vv_polynomial(rng: random.Random, n: int, degree: int, terms: int = 3) -> VVPolynomial:
    acc = {}
    for _ in range(terms):
        w = tuple(rng.randrange(n) for _ in range(degree))
        acc[VVMonomial(w)] = acc.get(VVMonomial(w), 0) + rng.randint(-4, 4)
    return VVPolynomial(acc)


# ----------------------------------------------------------------- scrambles


def _rewrite_factor(rng: random.Random, e: tuple) -> BracketPolynomial:
    """A random identity applied to one bracket."""
    a = len(e)
    moves = ["rotate", "reverse"]
    if a >= 3:
        moves.append("reduce")
    if a >= 4:
        moves += ["split", "caianiello"]
    move = rng.choice(moves)
    if move == "rotate":
        i = rng.randrange(a)
        return BracketPolynomial.bracket(e[i:] + e[:i])
    if move == "reverse":
        return BracketPolynomial.bracket(e[::-1], -1 if a % 2 else 1)
    if move == "reduce":
        i = rng.randrange(a - 2)
        j = rng.randrange(i + 2, a)
        return bracket_reduction_rhs(e[:i], e[i], e[i + 1 : j], e[j], e[j + 1 :])
    if move == "split":
        cut = rng.randrange(2, a - 1)
        return split_rhs([e[:cut], e[cut:]])
    return caianiello_expand(e)


def _rewrite_pair(rng: random.Random, f: tuple, g: tuple) -> BracketPolynomial:
    """Absorption, shuffle or general shuffle of two adjacent brackets at random cuts."""
    move = rng.choice(["absorb", "shuffle", "general"])
    if move == "absorb":
        return absorb_rhs(f[:-2], f[-2], f[-1], g[0], g[1:-1], g[-1])
    j = rng.randrange(len(g))
    b, w, c = g[:j], g[j], g[j + 1 :]
    if move == "shuffle":
        return shuffle_rhs(f[:-1], f[-1], b, w, c)
    i = rng.randrange(len(f))
    return general_shuffle_rhs(f[:i], f[i], f[i + 1 :], b, w, c)


def scramble(p: BracketPolynomial, rng: random.Random, steps: int = 3, zero_terms: bool = True) -> BracketPolynomial:
    """Value-equal polynomial obtained by random identity applications."""
    cur = p
    for _ in range(steps):
        items = list(cur.mapping.items())
        if not items:
            break
        (atoms, sq), c = rng.choice(items)
        brackets = [i for i, a in enumerate(atoms) if isinstance(a, BracketFactor)]
        if not brackets:
            continue
        if len(brackets) >= 2 and rng.random() < 0.3:
            i = rng.randrange(len(atoms) - 1)
            rhs = _rewrite_pair(rng, atoms[i].entries, atoms[i + 1].entries)
            width = 2
        else:
            i = rng.choice(brackets)
            rhs = _rewrite_factor(rng, atoms[i].entries)
            width = 1
        before, after = atoms[:i], atoms[i + width :]
        repl = {}
        for (at, s2), c2 in rhs.mapping.items():
            key = (before + at + after, tuple(sorted(sq + s2)))
            repl[key] = repl.get(key, 0) + c * c2
        cur = cur - BracketPolynomial({(atoms, sq): c}) + BracketPolynomial(repl)
    if zero_terms:
        degs = {sum(a.length for a in at) + 2 * len(sq) for at, sq in cur.mapping}
        n = 1 + max((v for at, _ in cur.mapping for a in at for v in a.entries), default=1)
        for d in sorted(degs):
            if d < 5:
                continue
            vs = [rng.randrange(n) for _ in range(d)]
            z, rest = (igp(vs[:5]), d - 5) if d != 6 else (db(vs[:6]), 0)
            if rest:
                z = z * BracketPolynomial.bracket(vs[-rest:])
            cur = cur + z.scale(rng.randint(1, 3))
    return cur
