"""Oracle-backed verification suites, shared by ``verify`` and the acceptance tests."""
from __future__ import annotations

import functools
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import permutations, product

from .core import (
    BracketFactor,
    BracketPolynomial,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    expand,
    fold,
    order_key,
)
from .gbasis import (
    generate_general,
    generate_multilinear,
    generate_squarefree,
    is_normal_shape,
    normal_monomials,
    reduce,
)
from .oracle import brute_force_closure, check_zero, check_zero_many, quotient_dimension, sub_contents
from .parser import from_json, parse, to_json, to_text
from .randgen import PolyConfig, random_bracket_polynomial, scramble
from .straighten import (
    _context_for,
    caianiello_expand,
    check_basic_identities,
    is_straight,
    leader_of,
    straighten,
)
from .unibracket import contents_of_size, generate_BG, to_unibracket, unibracket_normal_form, uni_base


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        if len(self.failures) < 20:
            self.failures.append(msg)
        else:
            self.details["truncated_failures"] = self.details.get("truncated_failures", 0) + 1

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["seconds"] = round(self.seconds, 3)
        return d


def _timed(fn):
    @functools.wraps(fn)
    def run(*args, **kw) -> SuiteResult:
        t = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t
        return res

    return run


# ----------------------------------------------------------------- soundness


@_timed
def gb_soundness(seed: int = 0, trials: int = 50, bg_size: int = 6) -> SuiteResult:
    """Every rule and every BG element vanishes under the oracle."""
    res = SuiteResult("gb")
    families = {}
    for n in range(3, 6):
        families[f"multilinear n={n}"] = [r.as_polynomial() for r in generate_multilinear(VariableContext.standard(n))]
    for n in range(2, 5):
        ctx = VariableContext.standard(n, [7] * n)
        families[f"general n={n}"] = [r.as_polynomial() for r in generate_general(ctx, max_length=7)]
        ctx = VariableContext.standard(n, [3] * n)
        families[f"squarefree n={n}"] = [r.as_polynomial() for r in generate_squarefree(ctx)]
    for name, polys in families.items():
        bad = check_zero_many(polys, trials=trials, seed=seed)
        res.checks += len(polys)
        res.details[name] = len(polys)
        for i in bad:
            res.fail(f"{name}: element {i} does not vanish")
    bg = []
    for m in range(3, bg_size + 1):
        for content in contents_of_size(m, m):
            base = uni_base(content)
            for variant in ("remark", "theorem"):
                bg += [e.poly for e in base.elements(variant).values()]
    bad = check_zero_many(bg, trials=trials, seed=seed, center=True)
    res.checks += len(bg)
    res.details[f"BG |M|<={bg_size}"] = len(bg)
    for i in bad:
        res.fail(f"BG element {i} does not vanish")
    return res


# ----------------------------------------------------------------- confluence


@_timed
def confluence(seed: int = 0, trials: int = 0, max_degree: int = 5) -> SuiteResult:
    """Exhaustive rewriting has a unique fixed point equal to ``reduce``."""
    res = SuiteResult("confluence")
    cases = [
        ("general n=3", generate_general(VariableContext.standard(3, [max_degree] * 3), max_length=max_degree),
         [w for d in range(max_degree + 1) for w in product(range(3), repeat=d)]),
        ("multilinear n=5", generate_multilinear(VariableContext.standard(5)),
         [w for d in range(max_degree + 1) for w in permutations(range(5), d)]),
    ]
    for name, rs, words in cases:
        for w in words:
            mono = VVMonomial(w)
            cl = brute_force_closure(mono, rs, max_degree=max_degree, max_vars=5)
            res.checks += 1
            if not cl.unique:
                res.fail(f"{name}: {w} has several fixed points")
            elif cl.fixed_point != reduce(VVPolynomial({mono: 1}), rs):
                res.fail(f"{name}: {w} closure disagrees with reduce")
        res.details[name] = len(words)
    return res


# ----------------------------------------------------------------- dimension


def _shape_count(kind: str, ctx: VariableContext, m: int) -> tuple[int, int]:
    """(shape-valid monomials, rule-reduced monomials) of degree m over ctx."""
    shapes = reduced = 0
    rs = {"multilinear": generate_multilinear, "general": generate_general, "squarefree": generate_squarefree}[kind](ctx)
    for content in sub_contents(ctx.content(), m):
        if kind == "multilinear" and any(k > 1 for k in content.values()):
            continue
        monos = normal_monomials(content, rs)
        reduced += len(monos)
        if kind == "squarefree":
            cands = _squarefree_monomials(content)
        else:
            cands = [VVMonomial(w) for w in _arrangements(content)]
        shapes += sum(1 for t in cands if is_normal_shape(t, kind))
    return shapes, reduced


def _arrangements(content: Counter):
    return sorted(set(permutations([v for v, k in content.items() for _ in range(k)])))


def _squarefree_monomials(content: Counter) -> list[VVMonomial]:
    out = set()
    for w in _arrangements(content):
        out.add(fold(w))
    return sorted(out, key=order_key)


@_timed
def dimension(seed: int = 0, trials: int = 0, n: int = 3, max_degree: int = 4) -> SuiteResult:
    """Shape counts against rule-reduced counts and the ideal-rank quotient dimension."""
    res = SuiteResult("dimension")
    for kind in ("multilinear", "general", "squarefree"):
        counts = [1] * n if kind == "multilinear" else [max_degree] * n
        ctx = VariableContext.standard(n, counts)
        top = n if kind == "multilinear" else max_degree
        for m in range(top + 1):
            shapes, reduced = _shape_count(kind, ctx, m)
            dim = quotient_dimension(m, ctx, kind, method="ideal")
            res.checks += 1
            res.details[f"{kind} m={m}"] = {"shape": shapes, "reduced": reduced, "quotient": dim}
            if not shapes == reduced == dim:
                res.fail(f"{kind} m={m}: shape {shapes}, reduced {reduced}, quotient {dim}")
    return res


# ------------------------------------------------------------- closed formula


def closed_formula(m: int) -> VVPolynomial:
    """(1 + (-1)^m)/2 v1..vm + sum_i (-1)^(i+1) (v1..^vi..vm) vi."""
    w = tuple(range(m))
    out = VVPolynomial.monomial(w, Fraction(1 + (-1) ** m, 2))
    for i in range(1, m):
        out = out + VVPolynomial.monomial(w[: i - 1] + w[i:] + (w[i - 1],), (-1) ** (i + 1))
    return out


@_timed
def single_bracket(seed: int = 0, trials: int = 0, lo: int = 3, hi: int = 7) -> SuiteResult:
    """Normal form of 2[v1..vm] against the closed formula."""
    res = SuiteResult("closed-formula")
    for m in range(lo, hi + 1):
        rs = generate_multilinear(VariableContext.standard(m))
        nf = reduce(expand(BracketPolynomial.bracket(tuple(range(m)), 2)), rs)
        res.checks += 1
        res.details[f"m={m}"] = len(nf)
        if nf != closed_formula(m):
            res.fail(f"m={m}: normal form differs from the closed formula")
    return res


# ----------------------------------------------------------------- Caianiello


def _partitions(total: int, least: int = 2):
    if total == 0:
        yield []
        return
    for k in range(least, total + 1):
        for rest in _partitions(total - k, k):
            yield [k] + rest


@_timed
def caianiello(seed: int = 0, trials: int = 20, max_length: int = 6) -> SuiteResult:
    """The four-term example exactly, then every length and partition under the oracle."""
    from .core import DomainError

    res = SuiteResult("caianiello")
    f = BracketFactor((0, 1, 2, 3))
    want = BracketPolynomial({
        ((BracketFactor((0, 1)), BracketFactor((2, 3))), ()): 1,
        ((BracketFactor((0, 2)), BracketFactor((1, 3))), ()): -1,
        ((BracketFactor((0, 3)), BracketFactor((1, 2))), ()): 1,
    })
    res.checks += 1
    if caianiello_expand(f, [2, 2]) != want:
        res.fail("[v1v2v3v4] expansion differs from the three-term formula")
    rng = random.Random(seed)
    polys, labels = [], []
    for length in range(2, max_length + 1):
        words = [tuple(range(length))] + [tuple(rng.randrange(4) for _ in range(length)) for _ in range(3)]
        for part in _partitions(length):
            for w in words:
                try:
                    e = caianiello_expand(w, part)
                except DomainError:
                    continue
                if any(a.length not in part for (atoms, _) in e.mapping for a in atoms):
                    res.fail(f"{w} {part}: factor length outside the partition")
                polys.append(BracketPolynomial.bracket(w) - e)
                labels.append(f"{w} {part}")
    for i in check_zero_many(polys, trials=trials, seed=seed):
        res.fail(f"{labels[i]}: expansion differs from the bracket")
    res.checks += len(polys)
    return res


# ----------------------------------------------------------------- identities


@_timed
def identities(seed: int = 0, trials: int = 20, count: int = 30) -> SuiteResult:
    res = SuiteResult("identities")
    for rep in check_basic_identities(count=count, trials=trials, seed=seed, max_len=2):
        res.checks += rep.instances
        res.details[rep.name] = rep.instances
        if not rep.ok:
            res.fail(f"{rep.name}: {len(rep.failures)} instances do not vanish")
    return res


# ---------------------------------------------------------------- straighten


@_timed
def straightening(seed: int = 0, trials: int = 3, corpus: int = 1000, pairs: int = 200,
                  cfg: PolyConfig = PolyConfig()) -> SuiteResult:
    """Shape, idempotence, invariance under identities and the leading-term contract."""
    res = SuiteResult("straighten")
    rng = random.Random(seed)
    polys = [random_bracket_polynomial(rng, cfg) for _ in range(corpus)]
    for i, p in enumerate(polys):
        s = straighten(p)
        if not all(is_straight(t) for t in straighten(p, orientation="straight").terms):
            res.fail(f"(a) corpus {i}: output term not straight")
        if straighten(s) != s:
            res.fail(f"(b) corpus {i}: not idempotent")
        if s:
            top = max((leader_of(at, sq) for at, sq in s.mapping), key=order_key)
            lt = reduce(expand(p), _context_for(p, None)).leading_term()[0]
            if top != lt:
                res.fail(f"(d) corpus {i}: leading representative {top} differs from {lt}")
        elif reduce(expand(p), _context_for(p, None)):
            res.fail(f"(d) corpus {i}: output 0 but the expansion is nonzero")
        if trials and i < 100 and not check_zero(p - s, trials=trials, seed=seed + i):
            res.fail(f"corpus {i}: output differs from input under the oracle")
    for j in range(pairs):
        p = polys[j % corpus]
        q = scramble(p, rng, steps=rng.randint(1, 5))
        if straighten(p) != straighten(q):
            res.fail(f"(c) pair {j}: scrambled copy straightens differently")
    # (a), (b), (d) per corpus entry, (c) per pair
    res.checks = 3 * corpus + pairs
    res.details = {"corpus": corpus, "pairs": pairs}
    return res


@_timed
def strategies(seed: int = 0, trials: int = 0, corpus: int = 200, cfg: PolyConfig = PolyConfig(n=4, max_degree=7)) -> SuiteResult:
    """Leader peeling and formula rewriting reach the same normal form."""
    res = SuiteResult("strategies")
    rng = random.Random(seed)
    fallbacks = steps = 0
    for i in range(corpus):
        p = random_bracket_polynomial(rng, cfg)
        r = straighten(p, strategy="rewrite", trace=True)
        fallbacks += r.fallbacks
        steps += len(r.trace)
        res.checks += 1
        if r.polynomial != straighten(p):
            res.fail(f"input {i}: strategies disagree")
    res.details = {"rewrite_steps": steps, "fallbacks": fallbacks}
    return res


# -------------------------------------------------------------- uni-bracket


def _degree_pair(rng: random.Random, m: int, n: int) -> tuple[BracketPolynomial, BracketPolynomial]:
    """A degree-m input and a partner that is equal about half of the time."""
    cfg = PolyConfig(n=n, max_degree=m, max_factors=3, max_terms=3)
    p = random_bracket_polynomial(rng, cfg, degree=m)
    q = scramble(p, rng, steps=3, zero_terms=False)
    if rng.random() < 0.5:
        q = q + random_bracket_polynomial(rng, cfg, degree=m)
    return p, q


@_timed
def layers(seed: int = 0, trials: int = 0, count: int = 200, max_degree: int = 6, n: int = 4) -> SuiteResult:
    """straighten-equality coincides with uni-bracket equality."""
    res = SuiteResult("layers")
    rng = random.Random(seed)
    equal = 0
    for i in range(count):
        p, q = _degree_pair(rng, rng.randint(3, max_degree), n)
        a = straighten(p) == straighten(q)
        b = unibracket_normal_form(to_unibracket(p)) == unibracket_normal_form(to_unibracket(q))
        equal += a
        res.checks += 1
        if a != b:
            res.fail(f"pair {i}: straighten says {a}, uni-bracket says {b}")
    res.details = {"equal_pairs": equal, "unequal_pairs": count - equal}
    return res


@_timed
def remark_equivalence(seed: int = 0, trials: int = 0, count: int = 200, max_degree: int = 6, n: int = 4) -> SuiteResult:
    """The "theorem" and "remark" variants give identical uni-bracket normal forms."""
    res = SuiteResult("remark")
    rng = random.Random(seed)
    for i in range(count):
        m = rng.randint(3, max_degree)
        p = random_bracket_polynomial(rng, PolyConfig(n=n, max_degree=m, max_factors=3), degree=m)
        a = unibracket_normal_form(p, variant="remark")
        b = unibracket_normal_form(p, variant="theorem")
        res.checks += 1
        if a != b:
            res.fail(f"input {i}: variants disagree")
    return res


@_timed
def unibracket(seed: int = 0, trials: int = 0, max_degree: int = 5) -> SuiteResult:
    """BG leaders against the echelon reference, BG size against the evaluation rank."""
    res = SuiteResult("unibracket")
    for m in range(3, max_degree + 1):
        for content in contents_of_size(m, m):
            base = uni_base(content)
            truth = base.leading_monomials()
            for variant in ("remark", "theorem"):
                res.checks += 1
                if set(base.elements(variant)) != truth:
                    res.fail(f"{content} {variant}: BG leaders differ from the reference")
    ctx = VariableContext.standard(3, [2, 1, 1])
    res.details["BG[v1^2 v2 v3]"] = len(generate_BG(ctx))
    return res


# -------------------------------------------------------------------- parser


def random_document(rng: random.Random, n: int = 5) -> tuple[VariableContext, BracketPolynomial]:
    """Random polynomial mixing bare variables, brackets and squares."""
    ctx = VariableContext.standard(n)
    acc: dict = {}
    for _ in range(rng.randint(0, 4)):
        atoms = []
        for _ in range(rng.randint(0, 3)):
            if rng.random() < 0.4:
                atoms.append(rng.randrange(n))
            else:
                atoms.append(BracketFactor(tuple(rng.randrange(n) for _ in range(rng.randint(2, 4)))))
        sq = tuple(sorted(rng.randrange(n) for _ in range(rng.choice([0, 0, 1, 2]))))
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        acc[(tuple(atoms), sq)] = acc.get((tuple(atoms), sq), 0) + c
    p = BracketPolynomial(acc)
    bound = p.content_bound()
    return ctx.with_counts([bound.get(i, 0) for i in range(n)]), p


@_timed
def parser_roundtrip(seed: int = 0, trials: int = 0, count: int = 1000) -> SuiteResult:
    res = SuiteResult("parser")
    rng = random.Random(seed)
    for i in range(count):
        ctx, p = random_document(rng)
        res.checks += 2
        if parse(to_text(p, ctx), ctx)[1] != p:
            res.fail(f"document {i}: text round trip changed the polynomial")
        if from_json(to_json(p, ctx))[1] != p:
            res.fail(f"document {i}: JSON round trip changed the polynomial")
    return res


SUITES = {
    "identities": identities,
    "gb": gb_soundness,
    "confluence": confluence,
    "dimension": dimension,
    "closed-formula": single_bracket,
    "caianiello": caianiello,
    "straighten": straightening,
    "strategies": strategies,
    "layers": layers,
    "remark": remark_equivalence,
    "unibracket": unibracket,
    "parser": parser_roundtrip,
}
