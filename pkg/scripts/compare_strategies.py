"""Leader peeling vs formula rewriting on a random corpus.

Reports agreement, wall time per strategy and how often the rewriting
strategy had to fall back to peeling because no formula lowered the leader.
"""
import argparse
import random
import time
from collections import Counter
from dataclasses import dataclass

from clifford_bracket.randgen import PolyConfig, random_bracket_polynomial
from clifford_bracket.straighten import straighten


@dataclass(frozen=True)
class CompareConfig:
    corpus: int = 300
    seed: int = 0
    poly: PolyConfig = PolyConfig(n=4, max_degree=7)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corpus", type=int, default=CompareConfig.corpus)
    ap.add_argument("--seed", type=int, default=CompareConfig.seed)
    ap.add_argument("--max-degree", type=int, default=7)
    args = ap.parse_args()
    cfg = CompareConfig(args.corpus, args.seed, PolyConfig(n=4, max_degree=args.max_degree))

    rng = random.Random(cfg.seed)
    polys = [random_bracket_polynomial(rng, cfg.poly) for _ in range(cfg.corpus)]
    timing = Counter()
    rules = Counter()
    agree = fallbacks = with_fallback = 0
    for p in polys:
        t = time.perf_counter()
        a = straighten(p)
        timing["leader"] += time.perf_counter() - t
        t = time.perf_counter()
        res = straighten(p, strategy="rewrite", trace=True)
        timing["rewrite"] += time.perf_counter() - t
        agree += a == res.polynomial
        fallbacks += res.fallbacks
        with_fallback += res.fallbacks > 0
        rules.update(s.rule for s in res.trace)

    print(f"corpus {cfg.corpus}, seed {cfg.seed}, degree <= {cfg.poly.max_degree}")
    print(f"agreement        {agree}/{cfg.corpus}")
    print(f"leader time      {timing['leader']:.2f}s")
    print(f"rewrite time     {timing['rewrite']:.2f}s")
    print(f"fallbacks        {fallbacks} (in {with_fallback} inputs)")
    print("rewrite steps    " + ", ".join(f"{k} {v}" for k, v in rules.most_common()))


if __name__ == "__main__":
    main()
