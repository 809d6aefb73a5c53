"""Command-line entry point.

Exit codes: 0 success, 1 domain error (or ``check-equal`` on unequal inputs),
2 usage error, 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from .core import (
    BracketFactor,
    BracketPolynomial,
    DomainError,
    InternalError,
    VariableContext,
    VVMonomial,
    VVPolynomial,
    expand,
    from_vv,
)
from .gbasis import KINDS, generate, migrate_squares, reduce
from .parser import ParseWarning, merge_contexts, parse, remap, to_json_obj, to_text
from .straighten import ORIENTATIONS, STRATEGIES, caianiello_expand, straighten
from .suites import SUITES
from .unibracket import VARIANTS, generate_BG, unibracket_normal_form


def _read(args) -> str:
    if getattr(args, "input", None):
        with open(args.input, encoding="utf-8") as fh:
            return fh.read()
    if args.expr is None or args.expr == "-":
        return sys.stdin.read()
    return args.expr


def _emit(args, p: BracketPolynomial, ctx: VariableContext, extra: dict | None = None):
    if args.format == "json":
        obj = to_json_obj(p, ctx)
        obj.update(extra or {})
        print(json.dumps(obj, sort_keys=True))
    else:
        print(to_text(p, ctx))


def _rules_for(kind: str, ctx: VariableContext):
    """Rule set of the given kind, or None when the alphabet is too small to carry syzygies."""
    letters = sum(1 for c in ctx.counts if c)
    if kind == "multilinear":
        if any(c > 1 for c in ctx.counts):
            raise DomainError("the multilinear ring needs every variable at most once")
        return generate(kind, ctx) if letters >= 3 else None
    return generate(kind, ctx) if letters >= 2 else None


# --------------------------------------------------------------- commands


def cmd_fmt(args) -> int:
    ctx, p = parse(_read(args))
    _emit(args, p, ctx)
    return 0


def cmd_normalize(args) -> int:
    ctx, p = parse(_read(args))
    if args.layer == "unibracket":
        out = unibracket_normal_form(p, variant=args.variant, fuel=args.fuel)
    else:
        vv = expand(p)
        if args.ring != "squarefree" and any(t.squares for t in vv.terms):
            raise DomainError("square parts need --ring squarefree")
        rs = _rules_for(args.ring, ctx)
        if rs is None:
            out = migrate_squares(vv) if args.ring == "squarefree" else vv
        else:
            out = reduce(vv, rs, fuel=args.fuel)
    _emit(args, from_vv(out), ctx)
    return 0


def cmd_straighten(args) -> int:
    ctx, p = parse(_read(args))
    res = straighten(p, strategy=args.strategy, orientation=args.orientation, trace=True, fuel=args.fuel)
    extra = None
    if args.trace:
        steps = [
            {"rule": s.rule, "before": to_text(BracketPolynomial([s.before]), ctx, header=False),
             "after": to_text(s.after, ctx, header=False)}
            for s in res.trace
        ]
        if args.format == "json":
            extra = {"trace": steps, "fallbacks": res.fallbacks}
        else:
            for s in steps:
                print(f"{s['rule']}: {s['before']} => {s['after']}", file=sys.stderr)
    _emit(args, res.polynomial, ctx, extra)
    return 0


def _parse_partition(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DomainError(f"bad partition {text!r}") from None


def cmd_expand(args) -> int:
    ctx, p = parse(_read(args))
    part = _parse_partition(args.partition)
    out = BracketPolynomial()
    for (atoms, sq), c in p.mapping.items():
        term = BracketPolynomial.term(c, (), sq)
        for a in atoms:
            if isinstance(a, BracketFactor) and (
                (part is None and a.length >= 4) or (part is not None and a.length == sum(part))
            ):
                term = term * caianiello_expand(a, part)
            else:
                term = term * BracketPolynomial.term(1, (a,))
        out = out + term
    _emit(args, out, ctx)
    return 0


def _context_from_flags(args) -> VariableContext:
    if not args.vars:
        raise DomainError("gb needs --vars, e.g. --vars 'v1<v2<v3'")
    names = [s.strip() for s in args.vars.split("<")]
    if args.multiset:
        ms = {}
        for item in args.multiset.split(","):
            name, _, k = item.partition(":")
            ms[name.strip()] = int(k) if k else 1
        return VariableContext.from_order(names, ms)
    return VariableContext(tuple(names), tuple([args.degree] * len(names)))


def cmd_gb(args) -> int:
    ctx = _context_from_flags(args)
    if args.layer == "unibracket":
        rows = [
            {"family": e.family, "form": to_text(e.form, ctx, header=False),
             "leader": to_text(from_vv(_mono(e.leader)), ctx, header=False),
             "polynomial": to_text(from_vv(e.poly), ctx, header=False)}
            for e in generate_BG(ctx, args.variant)
        ]
    else:
        rs = _rules_for(args.ring, ctx)
        rows = [
            {"family": r.tag, "leader": to_text(from_vv(_mono(r.lhs)), ctx, header=False),
             "remainder": to_text(from_vv(r.rhs), ctx, header=False)}
            for r in (rs or ())
        ]
    if args.format == "json":
        print(json.dumps({"vars": list(ctx.names), "elements": rows}, sort_keys=True))
    else:
        for r in rows:
            if "remainder" in r:
                print(f"{r['family']}: {r['leader']} -> {r['remainder']}")
            else:
                print(f"{r['family']} [{r['leader']}]: {r['polynomial']}")
    return 0


def _mono(m):
    m = m if isinstance(m, VVMonomial) else VVMonomial(tuple(m))
    return VVPolynomial({m: 1})


def cmd_check_equal(args) -> int:
    ca, a = parse(args.a)
    cb, b = parse(args.b)
    ctx = merge_contexts(ca, cb)
    diff = remap(a, ca, ctx) - remap(b, cb, ctx)
    equal = not straighten(diff, fuel=args.fuel)
    if args.format == "json":
        print(json.dumps({"equal": equal}))
    else:
        print("equal" if equal else "not equal")
    return 0 if equal else 1


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        kw = {"seed": args.seed}
        if args.trials is not None:
            kw["trials"] = args.trials
        reports.append(SUITES[name](**kw).as_dict())
    ok = all(r["passed"] for r in reports)
    print(json.dumps({"passed": ok, "suites": reports}, sort_keys=True, indent=2))
    return 0 if ok else 3


def cmd_check_identities(args) -> int:
    res = SUITES["identities"](seed=args.seed, trials=args.trials or 20)
    if args.format == "json":
        print(json.dumps(res.as_dict(), sort_keys=True))
    else:
        for name, k in res.details.items():
            print(f"{name}: {k} instances")
        print("all identities vanish" if res.passed else "\n".join(res.failures))
    return 0 if res.passed else 3


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clifford-bracket", description="Normalize Clifford bracket polynomials.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--fuel", type=int, default=None, help="rewrite budget (default from CLIFFORD_BRACKET_FUEL)")
    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("expr", nargs="?", help="expression text; '-' or omitted reads stdin")
    source.add_argument("-i", "--input", help="read the expression from a file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fmt", parents=[common, source], help="parse and print")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("normalize", parents=[common, source], help="normal form in the vv or uni-bracket layer")
    p.add_argument("--layer", choices=("vv", "unibracket"), default="vv")
    p.add_argument("--ring", choices=KINDS, default="squarefree")
    p.add_argument("--variant", choices=VARIANTS, default="remark")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("straighten", parents=[common, source], help="leader-normal or straight form")
    p.add_argument("--strategy", choices=STRATEGIES, default="leader")
    p.add_argument("--orientation", choices=ORIENTATIONS, default="leader")
    p.add_argument("--trace", action="store_true", help="emit the derivation")
    p.set_defaults(func=cmd_straighten)

    p = sub.add_parser("expand", parents=[common, source], help="Caianiello expansion of long brackets")
    p.add_argument("--partition", help="comma-separated part lengths, e.g. 2,2,3")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("gb", parents=[common], help="list a Groebner base or BG[M]")
    p.add_argument("--ring", choices=KINDS, default="general")
    p.add_argument("--layer", choices=("vv", "unibracket"), default="vv")
    p.add_argument("--variant", choices=VARIANTS, default="remark")
    p.add_argument("--vars", help="variable order, e.g. 'v1<v2<v3'")
    p.add_argument("--multiset", help="multiplicities, e.g. 'v1:2,v2:1,v3:1'")
    p.add_argument("--degree", type=int, default=1, help="multiplicity of every variable without --multiset")
    p.set_defaults(func=cmd_gb)

    p = sub.add_parser("check-equal", parents=[common], help="decide equality by straightening A - B")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_check_equal)

    p = sub.add_parser("verify", help="run oracle suites, JSON report")
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-identities", parents=[common], help="instantiate and verify every identity")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=cmd_check_identities)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ParseWarning)
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 3
    except (DomainError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
