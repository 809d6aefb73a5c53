"""Quotient dimensions by degree for each ring, plus BG[M] sizes per content."""
import argparse
from dataclasses import dataclass

from clifford_bracket.core import VariableContext
from clifford_bracket.oracle import quotient_dimension
from clifford_bracket.unibracket import contents_of_size, uni_base


@dataclass(frozen=True)
class TableConfig:
    n: int = 3
    max_degree: int = 5
    bg_size: int = 5


def ring_table(cfg: TableConfig):
    print(f"quotient dimension over {cfg.n} letters")
    print(f"{'kind':<12}" + "".join(f"{m:>7}" for m in range(cfg.max_degree + 1)))
    for kind in ("multilinear", "general", "squarefree"):
        counts = [1] * cfg.n if kind == "multilinear" else [cfg.max_degree] * cfg.n
        ctx = VariableContext.standard(cfg.n, counts)
        top = cfg.n if kind == "multilinear" else cfg.max_degree
        dims = [quotient_dimension(m, ctx, kind) if m <= top else None for m in range(cfg.max_degree + 1)]
        print(f"{kind:<12}" + "".join(f"{'-' if d is None else d:>7}" for d in dims))


def bg_table(cfg: TableConfig):
    print(f"\nBG[M] over {cfg.n} letters: content, |normal monomials|, |BG|, quotient dimension")
    for m in range(3, cfg.bg_size + 1):
        for content in contents_of_size(cfg.n, m):
            base = uni_base(content)
            label = " ".join(f"v{v + 1}^{k}" if k > 1 else f"v{v + 1}" for v, k in content)
            print(f"  {label:<18} {len(base.normal_monomials()):>5} {len(base.elements()):>5} "
                  f"{base.quotient_dimension():>5}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=TableConfig.n)
    ap.add_argument("--max-degree", type=int, default=TableConfig.max_degree)
    ap.add_argument("--bg-size", type=int, default=TableConfig.bg_size)
    args = ap.parse_args()
    cfg = TableConfig(args.n, args.max_degree, args.bg_size)
    ring_table(cfg)
    bg_table(cfg)


if __name__ == "__main__":
    main()
