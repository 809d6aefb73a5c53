"""Value types: variable contexts, monomials with square parts, polynomials, brackets."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union


class CliffordBracketError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CliffordBracketError, ValueError):
    """Invalid input: bad syntax, unknown variable, inapplicable rewrite."""


class ContextError(DomainError):
    pass


class InternalError(CliffordBracketError, RuntimeError):
    """An invariant of the engine broke (fuel exhaustion, non-confluence, order violation)."""


Var = int
Word = tuple[int, ...]


def natural_key(name: str):
    """Sort key putting v2 before v10."""
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


@dataclass(frozen=True)
class VariableContext:
    """Ordered alphabet v1 < ... < vn (rank = position) plus the working multiset M.

    ``counts[i]`` is the multiplicity of ``names[i]`` in M; zero means absent.
    """

    names: tuple[str, ...]
    counts: tuple[int, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise ContextError(f"invalid variable name {name!r}")
        counts = tuple(self.counts) if self.counts else (1,) * len(names)
        if len(counts) != len(names):
            raise ContextError("counts must match names")
        if any(c < 0 for c in counts):
            raise ContextError("multiplicities must be non-negative")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_order(cls, order: str | Sequence[str], multiset: Mapping[str, int] | None = None):
        names = [s.strip() for s in order.split("<")] if isinstance(order, str) else list(order)
        if multiset is None:
            return cls(tuple(names))
        unknown = set(multiset) - set(names)
        if unknown:
            raise ContextError(f"multiset keys not declared: {sorted(unknown)}")
        return cls(tuple(names), tuple(int(multiset.get(n, 0)) for n in names))

    @classmethod
    def standard(cls, n: int, counts: Sequence[int] | None = None) -> "VariableContext":
        """Context v1 < ... < vn."""
        return cls(tuple(f"v{i + 1}" for i in range(n)), tuple(counts) if counts else ())

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return sum(self.counts)

    @property
    def multiset(self) -> dict[str, int]:
        return {n: c for n, c in zip(self.names, self.counts) if c}

    def content(self) -> Counter:
        return Counter({i: c for i, c in enumerate(self.counts) if c})

    def rank(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContextError(f"undeclared variable {name!r}") from None

    def name(self, var: int) -> str:
        if not 0 <= var < len(self.names):
            raise ContextError(f"variable rank {var} outside context of size {self.n}")
        return self.names[var]

    def check(self, variables: Iterable[int]) -> None:
        for v in variables:
            if not 0 <= v < len(self.names):
                raise ContextError(f"variable rank {v} outside context of size {self.n}")

    def with_counts(self, counts: Sequence[int]) -> "VariableContext":
        return VariableContext(self.names, tuple(counts))

    def covers(self, content: Mapping[int, int]) -> bool:
        return all(0 <= v < self.n and c <= self.counts[v] for v, c in content.items())


def as_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


# ---------------------------------------------------------------- monomials


class VVMonomial(NamedTuple):
    """``left □ s``: a word of variable ranks and a sorted tuple of square pairs."""

    left: Word
    squares: Word = ()

    @property
    def degree(self) -> int:
        return len(self.left) + 2 * len(self.squares)

    def content(self) -> Counter:
        c = Counter(self.left)
        for v in self.squares:
            c[v] += 2
        return c

    def square_part(self) -> dict[int, int]:
        return dict(Counter(self.squares))


def merge_squares(*parts: Word) -> Word:
    return tuple(sorted(v for part in parts for v in part))


def fold(left: Sequence[int], squares: Sequence[int] = ()) -> VVMonomial:
    """Cancel adjacent equal letters into the square part, v v -> □ v^2."""
    stack: list[int] = []
    extra: list[int] = []
    for v in left:
        if stack and stack[-1] == v:
            stack.pop()
            extra.append(v)
        else:
            stack.append(v)
    if not extra:
        return VVMonomial(tuple(left), tuple(squares))
    return VVMonomial(tuple(stack), merge_squares(squares, extra))


def is_folded(left: Sequence[int]) -> bool:
    return all(a != b for a, b in zip(left, left[1:]))


@lru_cache(maxsize=1 << 18)
def canonical_form(m: VVMonomial) -> Word:
    """Lexicographically least word equal to ``m`` modulo the square relations.

    Each block v^{2r} is inserted, in increasing order of v, before the first
    letter strictly greater than v.
    """
    if not m.squares:
        return m.left
    g = list(m.left)
    for v, r in sorted(Counter(m.squares).items()):
        t = next((i for i, x in enumerate(g) if x > v), len(g))
        g[t:t] = [v] * (2 * r)
    return tuple(g)


def order_key(m: VVMonomial) -> tuple[int, Word]:
    """Degree first, then lex on the canonical form."""
    return (m.degree, canonical_form(m))


def compare(a: VVMonomial, b: VVMonomial, ctx: VariableContext | None = None) -> int:
    """-1, 0 or 1 as ``a`` is lower than, equal to or higher than ``b``."""
    if ctx is not None:
        ctx.check(a.left + a.squares + b.left + b.squares)
    ka, kb = order_key(a), order_key(b)
    return (ka > kb) - (ka < kb)


def reversion(s: Sequence[int]) -> tuple[Word, int]:
    return tuple(reversed(s)), 1


# -------------------------------------------------------------- polynomials


class VVPolynomial:
    """Exact rational combination of VVMonomials. Treated as immutable."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[VVMonomial, object] | Iterable[tuple[VVMonomial, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[VVMonomial, Fraction] = {}
        for mono, c in items:
            if not isinstance(mono, VVMonomial):
                mono = VVMonomial(*mono)
            acc[mono] = acc.get(mono, 0) + as_fraction(c)
        self._terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def monomial(cls, left: Sequence[int], coef=1, squares: Sequence[int] = ()) -> "VVPolynomial":
        return cls({VVMonomial(tuple(left), tuple(sorted(squares))): coef})

    @classmethod
    def _raw(cls, terms: dict) -> "VVPolynomial":
        p = cls.__new__(cls)
        p._terms = terms
        return p

    @property
    def terms(self) -> Mapping[VVMonomial, Fraction]:
        return self._terms

    def __iter__(self) -> Iterator[tuple[VVMonomial, Fraction]]:
        """Terms from highest to lowest."""
        return iter(sorted(self._terms.items(), key=lambda kv: order_key(kv[0]), reverse=True))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, VVPolynomial):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"VVPolynomial({dict(self)!r})"

    def __neg__(self):
        return VVPolynomial._raw({k: -v for k, v in self._terms.items()})

    def __add__(self, other: "VVPolynomial"):
        acc = dict(self._terms)
        for k, v in other._terms.items():
            s = acc.get(k, 0) + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        return VVPolynomial._raw(acc)

    def __sub__(self, other: "VVPolynomial"):
        return self + (-other)

    def scale(self, c) -> "VVPolynomial":
        c = as_fraction(c)
        if not c:
            return VVPolynomial()
        return VVPolynomial._raw({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, VVPolynomial):
            acc: dict[VVMonomial, Fraction] = {}
            for a, ca in self._terms.items():
                for b, cb in other._terms.items():
                    key = VVMonomial(a.left + b.left, merge_squares(a.squares, b.squares))
                    acc[key] = acc.get(key, 0) + ca * cb
            return VVPolynomial(acc)
        return self.scale(other)

    __rmul__ = scale

    def leading_term(self) -> tuple[VVMonomial, Fraction]:
        if not self._terms:
            raise DomainError("zero polynomial has no leading term")
        return max(self._terms.items(), key=lambda kv: order_key(kv[0]))

    def degrees(self) -> set[int]:
        return {m.degree for m in self._terms}


# ----------------------------------------------------------------- brackets


@dataclass(frozen=True, order=True)
class BracketFactor:
    """``[A]`` with representative ``entries``."""

    entries: Word

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def length(self) -> int:
        return len(self.entries)

    def leader(self) -> tuple[Word, int]:
        return bracket_leader(self)


Atom = Union[int, BracketFactor]


class BracketTerm(NamedTuple):
    coefficient: Fraction
    atoms: tuple[Atom, ...]
    squares: Word = ()

    @property
    def degree(self) -> int:
        return sum(atom_length(a) for a in self.atoms) + 2 * len(self.squares)

    def key(self) -> tuple[tuple[Atom, ...], Word]:
        return (self.atoms, self.squares)


def atom_length(a: Atom) -> int:
    return a.length if isinstance(a, BracketFactor) else 1


def atom_word(a: Atom) -> Word:
    return a.entries if isinstance(a, BracketFactor) else (a,)


def term_word(atoms: Sequence[Atom]) -> Word:
    return tuple(v for a in atoms for v in atom_word(a))


def _print_key(key: tuple[tuple[Atom, ...], Word]):
    atoms, squares = key
    mono = VVMonomial(term_word(atoms), squares)
    structure = tuple((1, a.entries) if isinstance(a, BracketFactor) else (0, (a,)) for a in atoms)
    return (order_key(mono), structure)


class BracketPolynomial:
    """Sum of bracket terms, stored as a map (atoms, squares) -> coefficient.

    Length-1 brackets annihilate their term and empty brackets are dropped at
    construction time.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[BracketTerm] | Mapping = ()):
        acc: dict = {}
        items = (
            ((k, c) for k, c in terms.items())
            if isinstance(terms, Mapping)
            else ((BracketTerm(*t).key(), BracketTerm(*t).coefficient) for t in terms)
        )
        for (atoms, squares), c in items:
            key = _normalize_key(atoms, squares)
            if key is None:
                continue
            acc[key] = acc.get(key, 0) + as_fraction(c)
        self._terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def _raw(cls, terms: dict) -> "BracketPolynomial":
        p = cls.__new__(cls)
        p._terms = terms
        return p

    @classmethod
    def term(cls, coef, atoms: Sequence[Atom], squares: Sequence[int] = ()) -> "BracketPolynomial":
        return cls([BracketTerm(as_fraction(coef), tuple(atoms), tuple(sorted(squares)))])

    @classmethod
    def bracket(cls, entries: Sequence[int], coef=1) -> "BracketPolynomial":
        return cls.term(coef, [BracketFactor(tuple(entries))])

    @classmethod
    def constant(cls, c) -> "BracketPolynomial":
        return cls.term(c, ())

    @property
    def terms(self) -> tuple[BracketTerm, ...]:
        """Terms in print order: descending representative order."""
        keys = sorted(self._terms, key=_print_key, reverse=True)
        return tuple(BracketTerm(self._terms[k], k[0], k[1]) for k in keys)

    @property
    def mapping(self) -> Mapping:
        return self._terms

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, BracketPolynomial):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"BracketPolynomial({list(self.terms)!r})"

    def __neg__(self):
        return BracketPolynomial._raw({k: -v for k, v in self._terms.items()})

    def __add__(self, other: "BracketPolynomial"):
        acc = dict(self._terms)
        for k, v in other._terms.items():
            s = acc.get(k, 0) + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        return BracketPolynomial._raw(acc)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BracketPolynomial":
        c = as_fraction(c)
        if not c:
            return BracketPolynomial()
        return BracketPolynomial._raw({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, BracketPolynomial):
            acc: dict = {}
            for (a1, s1), c1 in self._terms.items():
                for (a2, s2), c2 in other._terms.items():
                    key = (a1 + a2, merge_squares(s1, s2))
                    acc[key] = acc.get(key, 0) + c1 * c2
            return BracketPolynomial._raw({k: v for k, v in acc.items() if v})
        return self.scale(other)

    __rmul__ = scale

    def variables(self) -> set[int]:
        out: set[int] = set()
        for atoms, squares in self._terms:
            out.update(term_word(atoms))
            out.update(squares)
        return out

    def degrees(self) -> set[int]:
        return {BracketTerm(c, a, s).degree for (a, s), c in self._terms.items()}

    def content_bound(self) -> Counter:
        """Least multiset containing the content of every term."""
        bound: Counter = Counter()
        for atoms, squares in self._terms:
            c = VVMonomial(term_word(atoms), squares).content()
            bound |= c
        return bound


def _normalize_key(atoms, squares):
    out = []
    for a in atoms:
        if isinstance(a, BracketFactor):
            if a.length == 1:
                return None
            if a.length == 0:
                continue
        elif not isinstance(a, int):
            a = BracketFactor(tuple(a))
            if a.length == 1:
                return None
            if a.length == 0:
                continue
        out.append(a)
    return (tuple(out), tuple(sorted(squares)))


# --------------------------------------------------------------- expansions


def expand_term(atoms: Sequence[Atom], squares: Word = ()) -> dict[Word, Fraction]:
    """Expand ``atoms`` as a vector-variable polynomial over words (squares kept aside)."""
    acc: dict[Word, Fraction] = {(): Fraction(1)}
    for a in atoms:
        if isinstance(a, BracketFactor):
            e = a.entries
            sign = -1 if len(e) % 2 else 1
            pieces = [(e, Fraction(1, 2)), (e[::-1], Fraction(sign, 2))]
        else:
            pieces = [((a,), Fraction(1))]
        nxt: dict[Word, Fraction] = {}
        for w, c in acc.items():
            for p, cp in pieces:
                k = w + p
                nxt[k] = nxt.get(k, 0) + c * cp
        acc = {k: v for k, v in nxt.items() if v}
    return acc


def expand(p: BracketPolynomial) -> VVPolynomial:
    """Replace every bracket by its definition 2[A] = A + (-1)^a A†."""
    acc: dict[VVMonomial, Fraction] = {}
    for (atoms, squares), c in p.mapping.items():
        for w, cw in expand_term(atoms).items():
            key = VVMonomial(w, squares)
            acc[key] = acc.get(key, 0) + c * cw
    return VVPolynomial(acc)


def from_vv(p: VVPolynomial) -> BracketPolynomial:
    """View a vector-variable polynomial as a bracket polynomial with bare atoms."""
    return BracketPolynomial({(m.left, m.squares): c for m, c in p.terms.items()})


# ------------------------------------------------------------------ leaders


def bracket_leader(f: BracketFactor | Sequence[int], ctx: VariableContext | None = None) -> tuple[Word, int]:
    """The higher of A and A† with the sign relating [leader] to [A]."""
    a = f.entries if isinstance(f, BracketFactor) else tuple(f)
    if len(a) < 2:
        raise DomainError("bracket leader needs length >= 2")
    if ctx is not None:
        ctx.check(a)
    r = a[::-1]
    if r > a:
        return r, (-1 if len(a) % 2 else 1)
    return a, 1


def orient_brackets(t: BracketTerm, ctx: VariableContext | None = None) -> BracketTerm:
    coef = as_fraction(t.coefficient)
    atoms = []
    for a in t.atoms:
        if isinstance(a, BracketFactor) and a.length >= 2:
            lead, sign = bracket_leader(a, ctx)
            coef *= sign
            atoms.append(BracketFactor(lead))
        else:
            atoms.append(a)
    return BracketTerm(coef, tuple(atoms), t.squares)


def term_leader(atoms: Sequence[Atom], squares: Word = ()) -> VVMonomial:
    """Leading word of a term's expansion, read with every bracket at its leader."""
    w = []
    for a in atoms:
        w.extend(bracket_leader(a)[0] if isinstance(a, BracketFactor) else (a,))
    return fold(w, squares)


@dataclass(frozen=True)
class Tableau:
    rows: tuple[Word, ...]

    def __str__(self):
        return "\n".join(" ".join(map(str, r)) for r in self.rows)
