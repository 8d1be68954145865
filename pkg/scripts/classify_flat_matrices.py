"""Run the analyzer over every pair of the 18 flat Nmatrices and print the classes."""

import argparse
import itertools
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from nmt import corpus
from nmt.analyzer import Budget, analyze


@dataclass
class Config:
    depth: int = 3
    vars: int = 2
    premises: int = 2
    use_tilde_claims: bool = True
    out: str | None = None


def classes(names, equal_pairs):
    parent = {n: n for n in names}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in equal_pairs:
        parent[find(a)] = find(b)
    groups: dict[str, list] = {}
    for n in names:
        groups.setdefault(find(n), []).append(n)
    return sorted(groups.values(), key=len, reverse=True)


def main(cfg: Config) -> dict:
    names = list(corpus.FLAT_FAMILY)
    bases = [corpus.get(n) for n in corpus.FLAT_TABLES] if cfg.use_tilde_claims else None
    pool = [(n, corpus.get(n)) for n in corpus.names("nmatrix") if corpus.get(n).deterministic]
    budget = Budget(cfg.depth, cfg.vars, cfg.premises)
    t0 = time.perf_counter()
    rows = []
    for a, b in itertools.combinations(names, 2):
        v = analyze(corpus.get(a), corpus.get(b), budget, tilde_of=bases, corpus=pool)
        rows.append({"m1": a, "m2": b, "outcome": v.outcome, "stage": v.stage})
    elapsed = time.perf_counter() - t0
    counts: dict[str, int] = {}
    for r in rows:
        key = f"{r['outcome']}@{r['stage']}"
        counts[key] = counts.get(key, 0) + 1
    equal = [(r["m1"], r["m2"]) for r in rows if r["outcome"] == "Equivalent"]
    result = {
        "config": asdict(cfg),
        "seconds": round(elapsed, 3),
        "counts": dict(sorted(counts.items())),
        "classes": classes(names, equal),
        "unknown": [(r["m1"], r["m2"]) for r in rows if r["outcome"] == "Unknown"],
        "pairs": rows,
    }
    print(f"{len(rows)} pairs in {elapsed:.2f}s")
    for k, n in result["counts"].items():
        print(f"  {k:18} {n}")
    print(f"{len(result['classes'])} classes:")
    for c in result["classes"]:
        print("  {" + ", ".join(c) + "}")
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(result, indent=2) + "\n")
    return result


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--depth", type=int, default=Config.depth)
    p.add_argument("--vars", type=int, default=Config.vars)
    p.add_argument("--premises", type=int, default=Config.premises)
    p.add_argument("--no-tilde-claims", dest="use_tilde_claims", action="store_false")
    p.add_argument("--out")
    main(Config(**vars(p.parse_args())))
