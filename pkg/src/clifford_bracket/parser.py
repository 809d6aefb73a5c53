"""Text and JSON formats for bracket polynomials.

Grammar::

    document := ["vars" NAME ("<" NAME)* ";"] expr
    expr     := ["+" | "-"] term (("+" | "-") term)*
    term     := [NUMBER ["/" NUMBER]] factor* ["@" (NAME "^" NUMBER)*]
    factor   := NAME | "[" (NAME | bracket)* "]"

Names may be juxtaposed without spaces (``v1v2``); runs are split by longest
match against the declared names. A bracket nested inside another is expanded
on the spot, ``[X[D]Y] = 1/2 [XDY] + (-1)^d 1/2 [X D† Y]``. ``#`` starts a comment.
"""
from __future__ import annotations

import heapq
import json
import re
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    BracketFactor,
    BracketPolynomial,
    DomainError,
    VariableContext,
    natural_key,
)


class ParseError(DomainError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} at line {line}, column {col}" if line else message)
        self.line = line
        self.col = col


class ParseWarning(UserWarning):
    pass


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[\[\]@^/;<+\-])"
)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(kind if kind != "op" else m.group(), m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def split_names(run: str, declared: list[str] | None) -> list[str]:
    """Split a juxtaposed run of names, longest match first."""
    if declared is None:
        parts = re.findall(r"[A-Za-z_][0-9]*", run)
        if "".join(parts) != run:
            raise DomainError(f"cannot split {run!r} into variable names")
        return parts
    by_len = sorted(declared, key=len, reverse=True)
    out, i = [], 0
    while i < len(run):
        for name in by_len:
            if run.startswith(name, i):
                out.append(name)
                i += len(name)
                break
        else:
            raise DomainError(f"undeclared variable in {run!r}")
    return out


class _Parser:
    def __init__(self, text: str, declared: list[str] | None):
        self.toks = tokenize(text)
        self.i = 0
        self.declared = declared

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self, kind: str | None = None) -> Token:
        tok = self.toks[self.i]
        if kind is not None and tok.kind != kind:
            raise ParseError(f"expected {kind!r} but found {tok.text or 'end of input'!r}", tok.line, tok.col)
        self.i += 1
        return tok

    def header(self):
        tok = self.peek()
        if tok.kind == "name" and tok.text == "vars":
            self.take()
            names = [self.take("name").text]
            while self.peek().kind == "<":
                self.take()
                names.append(self.take("name").text)
            self.take(";")
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable in declaration", tok.line, tok.col)
            self.declared = names

    def names(self, tok: Token) -> list[str]:
        try:
            return split_names(tok.text, self.declared)
        except DomainError as e:
            raise ParseError(str(e), tok.line, tok.col) from None

    def expr(self) -> list:
        terms = []
        sign = 1
        if self.peek().kind in "+-":
            sign = -1 if self.take().kind == "-" else 1
        terms += self.term(sign)
        while self.peek().kind in ("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
            terms += self.term(sign)
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
        return terms

    def term(self, sign: int) -> list:
        start = self.peek()
        coef = Fraction(sign)
        seen = False
        if self.peek().kind == "num":
            num = int(self.take().text)
            den = 1
            if self.peek().kind == "/":
                self.take()
                dt = self.take("num")
                den = int(dt.text)
                if den == 0:
                    raise ParseError("zero denominator", dt.line, dt.col)
            coef *= Fraction(num, den)
            seen = True
        # each factor is a list of alternatives (coefficient, atoms)
        alts: list[tuple[Fraction, tuple]] = [(coef, ())]
        while self.peek().kind in ("name", "["):
            seen = True
            tok = self.peek()
            if tok.kind == "name":
                self.take()
                for name in self.names(tok):
                    v = name
                    alts = [(c, a + (v,)) for c, a in alts]
            else:
                inner = self.bracket()
                if any(len(e) == 1 for _, e in inner):
                    warnings.warn(
                        f"length-1 bracket at line {tok.line}, column {tok.col}; the term is zero",
                        ParseWarning,
                        stacklevel=4,
                    )
                alts = [(c * ci, a + (BracketFactor(e),)) for c, a in alts for ci, e in inner]
        squares: list[str] = []
        if self.peek().kind == "@":
            self.take()
            seen = True
            while self.peek().kind == "name":
                tok = self.take()
                names = self.names(tok)
                if len(names) != 1:
                    raise ParseError("one variable per square factor", tok.line, tok.col)
                self.take("^")
                et = self.take("num")
                e = int(et.text)
                if e == 0 or e % 2:
                    raise ParseError(f"square exponent must be even and positive, got {e}", et.line, et.col)
                squares += names * (e // 2)
        if not seen:
            raise ParseError(f"expected a term but found {start.text or 'end of input'!r}", start.line, start.col)
        return [(c, a, tuple(squares)) for c, a in alts]

    def bracket(self) -> list[tuple[Fraction, tuple]]:
        """Alternatives (coefficient, entries) whose sum equals the bracket."""
        self.take("[")
        alts: list[tuple[Fraction, tuple]] = [(Fraction(1), ())]
        while self.peek().kind != "]":
            tok = self.peek()
            if tok.kind == "name":
                self.take()
                names = tuple(self.names(tok))
                alts = [(c, e + names) for c, e in alts]
            elif tok.kind == "[":
                inner = self.bracket()
                nxt = []
                for ci, d in inner:
                    if len(d) == 1:
                        continue
                    sign = -1 if len(d) % 2 else 1
                    for c, e in alts:
                        if not d:
                            nxt.append((c * ci, e))
                        else:
                            nxt.append((c * ci / 2, e + d))
                            nxt.append((c * ci * sign / 2, e + d[::-1]))
                alts = nxt
            else:
                raise ParseError(f"unexpected {tok.text or 'end of input'!r} inside bracket", tok.line, tok.col)
        self.take("]")
        return alts


def parse(text: str, ctx: VariableContext | None = None) -> tuple[VariableContext, BracketPolynomial]:
    """Parse a document. Without a ``vars`` header the names of ``ctx`` are used,
    or else the names found are ordered naturally (v2 before v10)."""
    p = _Parser(text, list(ctx.names) if ctx is not None else None)
    p.header()
    raw = p.expr()
    used = {v for _, atoms, sq in raw for a in atoms for v in (a.entries if isinstance(a, BracketFactor) else (a,))}
    used |= {v for _, _, sq in raw for v in sq}
    names = p.declared if p.declared is not None else sorted(used, key=natural_key)
    rank = {n: i for i, n in enumerate(names)}
    terms = []
    for c, atoms, sq in raw:
        conv = tuple(BracketFactor(tuple(rank[v] for v in a.entries)) if isinstance(a, BracketFactor) else rank[a]
                     for a in atoms)
        terms.append((c, conv, tuple(sorted(rank[v] for v in sq))))
    acc: dict = {}
    for c, atoms, sq in terms:
        acc[(atoms, sq)] = acc.get((atoms, sq), 0) + c
    poly = BracketPolynomial(acc)
    bound = poly.content_bound()
    return VariableContext(tuple(names), tuple(bound.get(i, 0) for i in range(len(names)))), poly


def parse_polynomial(text: str, ctx: VariableContext) -> BracketPolynomial:
    c2, p = parse(text, ctx)
    if c2.names != ctx.names:
        return remap(p, c2, ctx)
    return p


def remap(p: BracketPolynomial, src: VariableContext, dst: VariableContext) -> BracketPolynomial:
    """Re-express ``p`` from ``src`` ranks into ``dst`` ranks (by name)."""
    m = {i: dst.rank(n) for i, n in enumerate(src.names)}
    acc = {}
    for (atoms, sq), c in p.mapping.items():
        conv = tuple(BracketFactor(tuple(m[v] for v in a.entries)) if isinstance(a, BracketFactor) else m[a]
                     for a in atoms)
        acc[(conv, tuple(sorted(m[v] for v in sq)))] = c
    return BracketPolynomial(acc)


def merge_contexts(*ctxs: VariableContext) -> VariableContext:
    """Union of alphabets respecting every input order; ties break naturally."""
    after: dict[str, set[str]] = {}
    indeg: Counter = Counter()
    for c in ctxs:
        for n in c.names:
            after.setdefault(n, set())
            indeg[n] += 0
        for x, y in zip(c.names, c.names[1:]):
            if y not in after[x]:
                after[x].add(y)
                indeg[y] += 1
    ready = [(natural_key(n), n) for n in after if not indeg[n]]
    heapq.heapify(ready)
    names: list[str] = []
    while ready:
        _, n = heapq.heappop(ready)
        names.append(n)
        for y in after[n]:
            indeg[y] -= 1
            if not indeg[y]:
                heapq.heappush(ready, (natural_key(y), y))
    if len(names) != len(after):
        raise DomainError("variable orders of the inputs disagree; declare a common order")
    counts = [max((c.counts[c.names.index(n)] if n in c.names else 0) for c in ctxs) for n in names]
    return VariableContext(tuple(names), tuple(counts))


# ------------------------------------------------------------------ printing


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_term(coef: Fraction, atoms, squares, ctx: VariableContext) -> str:
    parts = []
    for a in atoms:
        if isinstance(a, BracketFactor):
            parts.append("[" + " ".join(ctx.name(v) for v in a.entries) + "]")
        else:
            parts.append(ctx.name(a))
    if squares:
        parts.append("@")
        parts += [f"{ctx.name(v)}^{2 * k}" for v, k in sorted(Counter(squares).items())]
    mag = abs(coef)
    if not parts:
        return format_coefficient(mag)
    if mag != 1:
        parts.insert(0, format_coefficient(mag))
    return " ".join(parts)


def to_text(p: BracketPolynomial, ctx: VariableContext, header: bool = True) -> str:
    """Deterministic rendering, terms from highest to lowest."""
    body = []
    for i, t in enumerate(p.terms):
        s = format_term(t.coefficient, t.atoms, t.squares, ctx)
        if i == 0:
            body.append(("-" if t.coefficient < 0 else "") + s)
        else:
            body.append(("- " if t.coefficient < 0 else "+ ") + s)
    text = " ".join(body) if body else "0"
    if header and ctx.names:
        return f"vars {'<'.join(ctx.names)}; {text}"
    return text


def to_json_obj(p: BracketPolynomial, ctx: VariableContext) -> dict:
    terms = []
    for t in p.terms:
        atoms = [[ctx.name(v) for v in a.entries] if isinstance(a, BracketFactor) else ctx.name(a) for a in t.atoms]
        terms.append({
            "coefficient": format_coefficient(t.coefficient),
            "atoms": atoms,
            "squares": {ctx.name(v): k for v, k in sorted(Counter(t.squares).items())},
        })
    return {"vars": list(ctx.names), "terms": terms}


def to_json(p: BracketPolynomial, ctx: VariableContext) -> str:
    return json.dumps(to_json_obj(p, ctx), sort_keys=True)


def from_json(data: str | dict) -> tuple[VariableContext, BracketPolynomial]:
    obj = json.loads(data) if isinstance(data, str) else data
    try:
        names = list(obj["vars"])
        ctx = VariableContext(tuple(names))
        acc: dict = {}
        for t in obj["terms"]:
            atoms = tuple(
                BracketFactor(tuple(ctx.rank(v) for v in a)) if isinstance(a, list) else ctx.rank(a)
                for a in t["atoms"]
            )
            sq = tuple(sorted(ctx.rank(v) for v, k in t.get("squares", {}).items() for _ in range(int(k))))
            key = (atoms, sq)
            acc[key] = acc.get(key, 0) + Fraction(t["coefficient"])
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"malformed JSON polynomial: {e}") from None
    poly = BracketPolynomial(acc)
    bound = poly.content_bound()
    return VariableContext(tuple(names), tuple(bound.get(i, 0) for i in range(len(names)))), poly
