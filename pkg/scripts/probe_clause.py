"""Strict vs non-strict leading-variable clause against exhaustive elimination.

For every content of size m over n letters, the normal uni-bracket monomials
are read off the echelon form of the removal ideal and compared with both
readings of the predicate.
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass

from clifford_bracket.unibracket import contents_of_size, probe_predicates


@dataclass(frozen=True)
class ProbeConfig:
    n: int = 4
    min_m: int = 3
    max_m: int = 5


def run(cfg: ProbeConfig) -> list[dict]:
    rows = []
    for m in range(cfg.min_m, cfg.max_m + 1):
        t = time.perf_counter()
        contents = normal = 0
        strict, loose, examples = 0, 0, []
        for content in contents_of_size(cfg.n, m):
            r = probe_predicates(content)
            contents += 1
            normal += r.normal
            strict += len(r.strict_mismatch)
            loose += len(r.loose_mismatch)
            examples += [x.left for x in r.strict_mismatch[:1]]
        rows.append({
            "m": m, "contents": contents, "normal": normal,
            "strict_mismatches": strict, "non_strict_mismatches": loose,
            "strict_examples": examples[:5], "seconds": round(time.perf_counter() - t, 2),
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=ProbeConfig.n)
    ap.add_argument("--max-m", type=int, default=ProbeConfig.max_m)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = ProbeConfig(n=args.n, max_m=args.max_m)
    rows = run(cfg)
    if args.json:
        print(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2))
        return
    print(f"{'m':>2} {'contents':>8} {'normal':>7} {'strict':>7} {'non-strict':>10}  seconds")
    for r in rows:
        print(f"{r['m']:>2} {r['contents']:>8} {r['normal']:>7} {r['strict_mismatches']:>7} "
              f"{r['non_strict_mismatches']:>10}  {r['seconds']}")
    for r in rows:
        if r["strict_examples"]:
            print(f"m={r['m']} strict reading rejects normal words such as {r['strict_examples']}")


if __name__ == "__main__":
    main()
