"""Time the consequence checker against exhaustive enumeration on random instances."""

import argparse
import itertools
import random
import statistics
import time
from dataclasses import dataclass

from nmt import corpus
from nmt.formula import App, Var, subformulas_of_all
from nmt.semantics import decide_consequence


@dataclass
class Config:
    matrices: tuple[str, ...] = ("U", "M1", "M6", "K", "tilde_M7", "tilde_I")
    instances: int = 200
    depth: int = 4
    vars: int = 3
    max_premises: int = 3
    seed: int = 0
    brute_force_limit: int = 200_000


def random_formula(rng, sig, nvars, depth):
    if depth <= 1 or rng.random() < 0.3:
        return Var(rng.randint(1, nvars))
    c, k = rng.choice([(c, k) for c, k in sig.items() if k > 0])
    return App(c, [random_formula(rng, sig, nvars, depth - 1) for _ in range(k)])


def brute_force(m, gamma, a):
    nodes = subformulas_of_all(list(gamma) + [a])
    for vals in itertools.product(m.values, repeat=len(nodes)):
        v = dict(zip(nodes, vals))
        if all(
            not isinstance(b, App) or v[b] in m.apply(b.connective, *(v[x] for x in b.args)) for b in nodes
        ) and all(m.is_designated(v[g]) for g in gamma) and not m.is_designated(v[a]):
            return False
    return True


def main(cfg: Config) -> None:
    rng = random.Random(cfg.seed)
    print(f"{'matrix':10} {'|sub|':>6} {'search ms':>10} {'brute ms':>10} {'holds':>6}")
    for name in cfg.matrices:
        m = corpus.get(name)
        fast, slow, sizes, holds = [], [], [], 0
        for _ in range(cfg.instances):
            gamma = [random_formula(rng, m.signature, cfg.vars, cfg.depth) for _ in range(rng.randint(0, cfg.max_premises))]
            a = random_formula(rng, m.signature, cfg.vars, cfg.depth)
            n = len(subformulas_of_all(gamma + [a]))
            sizes.append(n)
            t0 = time.perf_counter()
            r = bool(decide_consequence(m, gamma, a))
            fast.append(time.perf_counter() - t0)
            holds += r
            if len(m.values) ** n <= cfg.brute_force_limit:
                t0 = time.perf_counter()
                assert brute_force(m, gamma, a) == r
                slow.append(time.perf_counter() - t0)
        bf = f"{1000 * statistics.mean(slow):10.3f}" if slow else f"{'-':>10}"
        print(f"{name:10} {statistics.mean(sizes):6.1f} {1000 * statistics.mean(fast):10.3f} {bf} {holds:6}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--instances", type=int, default=Config.instances)
    p.add_argument("--depth", type=int, default=Config.depth)
    p.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(p.parse_args())))
