"""Compile the bundled counter machines and look for closed theorems.

For each machine: simulate it, compile it, count closed formulas designated
in every numeral world, run the bounded theorem search on the compiled and
tilded Nmatrices, and analyze the reduction pair.
"""

import argparse
import time
from dataclasses import dataclass, field

from nmt import corpus
from nmt.analyzer import Budget, analyze, search_theorem_bounded
from nmt.constructions import tilde
from nmt.machines import build_reduction_pair, closed_theorem_candidates, compile_machine, encode_trace, run


@dataclass
class Config:
    machines: list[str] = field(default_factory=lambda: ["INC1", "INCTEST", "LOOP"])
    max_steps: int = 10_000
    search_depth: int = 6
    census_depth: int = 5


def report(name: str, cfg: Config) -> None:
    c = corpus.get(name)
    t = run(c, max_steps=cfg.max_steps)
    m = compile_machine(c)
    print(f"{name}: {len(m.values)} values, {len(m.designated)} designated")
    print(f"  run: {' -> '.join(str(x) for x in t.configurations[:8])}{' ...' if len(t.configurations) > 8 else ''}")
    print(f"  halted: {t.halted}")
    if t.halted:
        print(f"  trace formula: {encode_trace(t).text}")
    census = closed_theorem_candidates(c, cfg.census_depth)
    print(f"  depth <= {cfg.census_depth}: {census['closed_formulas']} closed formulas, "
          f"{census['candidates']} designated in all numeral worlds")
    for label, mm in (("compiled", m), ("tilded", tilde(m))):
        t0 = time.perf_counter()
        a = search_theorem_bounded(mm, cfg.search_depth, 0)
        print(f"  theorem search ({label}, depth {cfg.search_depth}): "
              f"{a.text if a else None}  [{time.perf_counter() - t0:.2f}s]")
    mt, u = build_reduction_pair(c)
    v = analyze(mt, u, Budget(max(encode_trace(t).depth if t.halted else 3, 1), 0, 0))
    print(f"  reduction pair: {v.outcome} at stage {v.stage} ({v.stage_name})")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("machines", nargs="*", default=Config().machines)
    p.add_argument("--max-steps", type=int, default=Config.max_steps)
    p.add_argument("--search-depth", type=int, default=Config.search_depth)
    p.add_argument("--census-depth", type=int, default=Config.census_depth)
    cfg = Config(**vars(p.parse_args()))
    for n in cfg.machines:
        report(n, cfg)
