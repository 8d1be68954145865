import itertools
import random
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from nmt import corpus  # noqa: E402
from nmt.formula import App, Formula, Signature, Var  # noqa: E402
from nmt.semantics import NMatrix  # noqa: E402


@pytest.fixture(scope="session")
def C():
    """Name -> artifact for the bundled corpus."""
    return {e.name: e.artifact for e in corpus.load_corpus()}


def formulas(sig: Signature, nvars: int = 2, max_depth: int = 3) -> st.SearchStrategy[Formula]:
    leaves = [st.builds(Var, st.integers(1, nvars))]
    leaves += [st.just(App(c)) for c in sig.of_arity(0)]
    base = st.one_of(leaves)

    def extend(children):
        opts = [
            st.tuples(*[children] * k).map(lambda args, c=c: App(c, args))
            for c, k in sig.items()
            if k > 0
        ]
        return st.one_of(opts)

    return st.recursive(base, extend, max_leaves=2 ** max_depth).filter(lambda a: a.depth <= max_depth)


@st.composite
def nmatrices(draw, sig: Signature, max_values: int = 3, deterministic: bool = False):
    n = draw(st.integers(1, max_values))
    values = [f"v{i}" for i in range(n)]
    des = draw(st.sets(st.sampled_from(values)))
    interp = {}
    for c, k in sig.items():
        rows = {}
        for args in itertools.product(values, repeat=k):
            if deterministic:
                outs = [draw(st.sampled_from(values))]
            else:
                outs = sorted(draw(st.sets(st.sampled_from(values), min_size=1)))
            rows[args] = outs
        interp[c] = rows
    return NMatrix(sig, values, des, interp)


def random_formula(rng: random.Random, sig: Signature, nvars: int, depth: int) -> Formula:
    if depth <= 1 or rng.random() < 0.3:
        leaves = [Var(i) for i in range(1, nvars + 1)] + [App(c) for c in sig.of_arity(0)]
        return rng.choice(leaves)
    conns = [(c, k) for c, k in sig.items() if k > 0]
    c, k = rng.choice(conns)
    return App(c, [random_formula(rng, sig, nvars, depth - 1) for _ in range(k)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
