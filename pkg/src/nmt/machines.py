"""Minsky counter machines, their simulator, and their compilation into Nmatrices.

The compiled Nmatrix has exactly one theorem, the encoding of the
zero-started computation, when the machine halts, and none otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .formula import NAME_RE, VAR_RE, App, Formula, Signature
from .semantics import NMatrix

R_EQ0, R_GE0, R_GE1, R_GE2 = "r_eq0", "r_ge0", "r_ge1", "r_ge2"
NUM = (R_EQ0, R_GE0, R_GE1, R_GE2)
INIT, ERROR = "init", "error"
ZERO, EPS, SUCC = "zero", "eps", "succ"


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class Inc:
    counter: int
    next: str


@dataclass(frozen=True)
class Test:
    """Decrement-or-branch: ``nonzero`` after decrementing, ``zero`` otherwise."""

    __test__ = False

    counter: int
    nonzero: str
    zero: str


Instruction = Union[Inc, Test]


@dataclass(frozen=True)
class CounterMachine:
    counters: int
    states: tuple[str, ...]
    initial: str
    transitions: Mapping[str, Instruction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", dict(self.transitions))
        problems = []
        if self.counters < 0:
            problems.append("counter count must be non-negative")
        if len(set(self.states)) != len(self.states):
            problems.append("duplicate state")
        for q in self.states:
            if not NAME_RE.match(q) or VAR_RE.match(q):
                problems.append(f"state name {q!r} is not a valid connective suffix")
        if self.initial not in self.states:
            problems.append(f"initial state {self.initial!r} not in states")
        for q, ins in self.transitions.items():
            if q not in self.states:
                problems.append(f"transition from unknown state {q!r}")
            targets = [ins.next] if isinstance(ins, Inc) else [ins.nonzero, ins.zero]
            for t in targets:
                if t not in self.states:
                    problems.append(f"transition {q!r} -> unknown state {t!r}")
            if not 1 <= ins.counter <= self.counters:
                problems.append(f"transition {q!r} uses counter {ins.counter} outside 1..{self.counters}")
        if problems:
            raise MachineError("; ".join(problems))

    @property
    def halting(self) -> tuple[str, ...]:
        return tuple(q for q in self.states if q not in self.transitions)

    def __hash__(self) -> int:
        return hash((self.counters, self.states, self.initial, tuple(sorted(self.transitions.items()))))

    def to_json(self) -> dict:
        tr = {}
        for q in self.states:
            ins = self.transitions.get(q)
            if isinstance(ins, Inc):
                tr[q] = {"op": "inc", "counter": ins.counter, "next": ins.next}
            elif isinstance(ins, Test):
                tr[q] = {"op": "test", "counter": ins.counter, "nonzero": ins.nonzero, "zero": ins.zero}
        return {"counters": self.counters, "states": list(self.states), "initial": self.initial, "transitions": tr}

    @classmethod
    def from_json(cls, data: Mapping) -> "CounterMachine":
        try:
            tr: dict[str, Instruction] = {}
            for q, ins in data.get("transitions", {}).items():
                if ins["op"] == "inc":
                    tr[q] = Inc(int(ins["counter"]), ins["next"])
                elif ins["op"] == "test":
                    tr[q] = Test(int(ins["counter"]), ins["nonzero"], ins["zero"])
                else:
                    raise MachineError(f"unknown op {ins['op']!r} in state {q!r}")
            return cls(int(data["counters"]), tuple(data["states"]), data["initial"], tr)
        except (KeyError, TypeError) as exc:
            raise MachineError(f"malformed machine JSON: missing or bad {exc}") from exc


@dataclass(frozen=True)
class Configuration:
    state: str
    counters: tuple[int, ...]

    def __str__(self) -> str:
        return f"⟨{self.state},({','.join(map(str, self.counters))})⟩"


@dataclass(frozen=True)
class Trace:
    configurations: tuple[Configuration, ...]
    halted: bool

    def __len__(self) -> int:
        return len(self.configurations)

    def to_json(self) -> dict:
        return {
            "halted": self.halted,
            "steps": len(self.configurations) - 1,
            "configurations": [
                {"state": c.state, "counters": list(c.counters)} for c in self.configurations
            ],
        }


def step(c: CounterMachine, conf: Configuration) -> Configuration:
    ins = c.transitions.get(conf.state)
    if ins is None:
        raise MachineError(f"{conf.state!r} is a halting state")
    a = list(conf.counters)
    i = ins.counter - 1
    if isinstance(ins, Inc):
        a[i] += 1
        return Configuration(ins.next, tuple(a))
    if a[i] != 0:
        a[i] -= 1
        return Configuration(ins.nonzero, tuple(a))
    return Configuration(ins.zero, tuple(a))


def run(c: CounterMachine, initial: Sequence[int] | None = None, max_steps: int = 10_000) -> Trace:
    """Iterate ``step`` from the initial state for at most ``max_steps`` steps."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    a = tuple(initial) if initial is not None else (0,) * c.counters
    if len(a) != c.counters:
        raise MachineError(f"expected {c.counters} initial counter values, got {len(a)}")
    conf = Configuration(c.initial, a)
    confs = [conf]
    for _ in range(max_steps):
        if conf.state not in c.transitions:
            break
        conf = step(c, conf)
        confs.append(conf)
    return Trace(tuple(confs), conf.state not in c.transitions)


# --------------------------------------------------------------------------
# encodings


def step_name(q: str) -> str:
    return f"step_{q}"


def machine_signature(c: CounterMachine) -> Signature:
    conns = [(ZERO, 0), (EPS, 0), (SUCC, 1)]
    conns += [(step_name(q), c.counters + 1) for q in c.states]
    return Signature(conns)


def encode_number(a: int) -> Formula:
    f: Formula = App(ZERO)
    for _ in range(a):
        f = App(SUCC, [f])
    return f


def encode_configurations(confs: Sequence[Configuration]) -> Formula:
    f: Formula = App(EPS)
    for conf in confs:
        f = App(step_name(conf.state), [f] + [encode_number(x) for x in conf.counters])
    return f


def encode_trace(t: Trace) -> Formula:
    return encode_configurations(t.configurations)


# --------------------------------------------------------------------------
# compilation


def conf_value(q: str, rs: Sequence[str]) -> str:
    return "_".join(["conf", q, *rs])


SUCC_TABLE = {
    R_EQ0: (R_GE1,),
    R_GE0: (R_GE0, R_GE1),
    R_GE1: (R_GE2,),
    R_GE2: (R_GE2,),
}
ZERO_OUT = (R_EQ0, R_GE0)


def _succ(x: str) -> tuple[str, ...]:
    return SUCC_TABLE.get(x, (ERROR,))


def compile_machine(c: CounterMachine) -> NMatrix:
    """The Nmatrix induced by ``c`` over its signature zero/0, eps/0, succ/1, step_q/(n+1)."""
    n = c.counters
    confs: dict[str, tuple[str, tuple[str, ...]]] = {}
    for q in c.states:
        for rs in itertools.product(NUM, repeat=n):
            confs[conf_value(q, rs)] = (q, rs)
    values = list(NUM) + list(confs) + [INIT, ERROR]
    halting = set(c.halting)
    designated = [v for v, (q, _) in confs.items() if q in halting]

    interp: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {
        ZERO: {(): ZERO_OUT},
        EPS: {(): (INIT,)},
        SUCC: {(x,): _succ(x) for x in values},
    }
    start_vectors = {(R_EQ0,) * n, (R_GE0,) * n}
    for q in c.states:
        rows: dict[tuple[str, ...], tuple[str, ...]] = {}
        for x in values:
            for z in itertools.product(values, repeat=n):
                rows[(x, *z)] = (_step_out(c, q, x, z, confs, start_vectors),)
        interp[step_name(q)] = rows
    return NMatrix(machine_signature(c), values, designated, interp)


def _step_out(c, q, x, z, confs, start_vectors) -> str:
    if x == INIT:
        if q == c.initial and z in start_vectors:
            return conf_value(q, z)
        return ERROR
    if x not in confs or not all(zi in SUCC_TABLE for zi in z):
        return ERROR
    q_prev, y = confs[x]
    ins = c.transitions.get(q_prev)
    if ins is None:
        return ERROR
    i = ins.counter - 1
    others_equal = all(z[l] == y[l] for l in range(len(z)) if l != i)
    if isinstance(ins, Inc):
        if ins.next == q and others_equal and z[i] in _succ(y[i]):
            return conf_value(q, z)
        return ERROR
    if ins.nonzero == q and others_equal and y[i] in _succ(z[i]):
        return conf_value(q, z)
    if ins.zero == q and y[i] in ZERO_OUT and tuple(z) == tuple(y):
        return conf_value(q, z)
    return ERROR


def canonical_numeric_assignment(kind: str, m: int, k: int | None = None) -> dict[Formula, str]:
    """Restriction of the canonical numeral valuations to enc(0..m).

    ``kind`` is ``"eq"``, ``"omega"`` or ``"k"`` (with threshold ``k``).
    """
    out: dict[Formula, str] = {}
    for a in range(m + 1):
        if kind == "eq":
            v = R_EQ0 if a == 0 else R_GE1 if a == 1 else R_GE2
        elif kind == "omega":
            v = R_GE0
        elif kind == "k":
            if k is None or k < 0:
                raise ValueError("kind 'k' needs a non-negative threshold")
            v = R_GE0 if a <= k else R_GE1 if a == k + 1 else R_GE2
        else:
            raise ValueError(f"unknown kind {kind!r}")
        out[encode_number(a)] = v
    return out


def numeric_worlds(m: int) -> list[tuple[str, dict[Formula, str]]]:
    """All distinct canonical assignments on enc(0..m), labelled."""
    worlds = [("eq", canonical_numeric_assignment("eq", m)), ("omega", canonical_numeric_assignment("omega", m))]
    for k in range(m):
        worlds.append((f"k{k}", canonical_numeric_assignment("k", m, k)))
    return worlds


def build_reduction_pair(c: CounterMachine) -> tuple[NMatrix, NMatrix]:
    """(tilde of the compiled Nmatrix, U over the same signature).

    The two are inequivalent exactly when ``c`` halts from all-zero counters.
    """
    from .constructions import tilde, unconstrained

    m = compile_machine(c)
    return tilde(m), unconstrained(m.signature)


# --------------------------------------------------------------------------
# closed-formula census


def world_vector(m: NMatrix, a: Formula, worlds) -> tuple[str, ...]:
    """Value of closed ``a`` in each numeral world (deterministic off the numerals)."""
    out = []
    for _, w in worlds:
        memo: dict[Formula, str] = {}

        def ev(b: Formula) -> str:
            if b in w:
                return w[b]
            if b not in memo:
                outs = m.apply(b.connective, *(ev(x) for x in b.args))
                if len(outs) != 1:
                    raise MachineError(f"{b.text} is not fixed by the numeral world")
                memo[b] = next(iter(outs))
            return memo[b]

        out.append(ev(a))
    return tuple(out)


def closed_theorem_candidates(c: CounterMachine, depth: int) -> dict:
    """Count closed formulas of depth <= ``depth`` designated in every numeral world.

    Off the numerals the compiled tables are deterministic, and the only closed
    formulas valued in Num are numerals, so a closed formula's value is fixed
    by the numeral world.  The canonical worlds extend to valuations, hence a
    closed theorem is designated in each of them.  Formulas are grouped by
    their vector of values across worlds, which keeps the count exact without
    listing the formulas.
    """
    m = compile_machine(c)
    worlds = numeric_worlds(max(depth, 1))
    nw = len(worlds)
    num_vec = {a: tuple(w[encode_number(a)] for _, w in worlds) for a in range(depth)}
    numeral_of = {v: a for a, v in num_vec.items()}

    def apply(conn, args):
        return tuple(next(iter(m.apply(conn, *(x[w] for x in args)))) for w in range(nw))

    def add(acc, vec, n):
        acc[vec] = acc.get(vec, 0) + n

    exact: dict[tuple[str, ...], int] = {}
    if depth >= 1:
        add(exact, num_vec[0], 1)
        add(exact, (INIT,) * nw, 1)
    upto = dict(exact)
    k = c.counters + 1
    for d in range(2, depth + 1):
        new: dict[tuple[str, ...], int] = {}
        for vec, cnt in exact.items():
            a = numeral_of.get(vec)
            # the unique formula carrying a numeral vector is that numeral
            add(new, num_vec[a + 1] if a is not None else apply(SUCC, [vec]), cnt)
        older = {v: n for v, n in ((v, upto[v] - exact.get(v, 0)) for v in upto) if n}
        for q in c.states:
            conn = step_name(q)
            for pool, sign in ((upto, 1), (older, -1)):
                for args in itertools.product(pool.items(), repeat=k):
                    n = sign
                    for _, cnt in args:
                        n *= cnt
                    add(new, apply(conn, [v for v, _ in args]), n)
        exact = {v: n for v, n in new.items() if n}
        for v, n in exact.items():
            add(upto, v, n)
    des = set(m.designated)
    cands = {v: n for v, n in upto.items() if all(x in des for x in v)}
    return {
        "depth": depth,
        "worlds": [name for name, _ in worlds],
        "closed_formulas": sum(upto.values()),
        "candidates": sum(cands.values()),
        "candidate_vectors": cands,
    }
