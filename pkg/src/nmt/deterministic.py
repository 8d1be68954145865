"""Complete decision procedures for finite deterministic matrices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .formula import App, Formula, Var
from .semantics import MultiFunctionTable, NMatrix, SignatureMismatch

DEFAULT_THETA_CAP = 200_000
DEFAULT_WORK_CAP = 20_000_000


class NotDeterministicError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    pass


def _require_deterministic(*ms: NMatrix) -> None:
    for m in ms:
        if not m.deterministic:
            raise NotDeterministicError(f"{m!r} is not deterministic")


def _require_same_signature(m1: NMatrix, m2: NMatrix) -> None:
    if m1.signature != m2.signature:
        raise SignatureMismatch(f"{m1.signature!r} vs {m2.signature!r}")


Table = tuple[int, ...]


def var_table(m: NMatrix, n: int, i: int) -> Table:
    return tuple(xs[i - 1] for xs in itertools.product(range(len(m.values)), repeat=n))


def apply_table(m: NMatrix, c: str, args: Sequence[Table], rows: int) -> Table:
    if not args:
        return (m.out(c, ())[0],) * rows
    return tuple(m.out(c, col)[0] for col in zip(*args))


def function_closure(
    ms: Sequence[NMatrix],
    n: int,
    cap: int = DEFAULT_THETA_CAP,
    max_depth: int | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
) -> tuple[list[Formula], dict[Formula, tuple[Table, ...]]]:
    """Representatives for every tuple of n-place functions jointly expressible in ``ms``.

    Starts from the leaves (p1..pn and constants) and closes under the
    connectives using compositionality of deterministic tables.  Round r
    adds formulas of depth r+1, so every representative is the canonically
    first formula with its tuple of tables.  ``max_depth`` stops the closure
    early.  ``work_cap`` bounds the number of table applications.
    """
    _require_deterministic(*ms)
    sig = ms[0].signature
    rows = [len(m.values) ** n for m in ms]
    seen: dict[tuple[Table, ...], Formula] = {}
    tables: dict[Formula, tuple[Table, ...]] = {}
    reps: list[Formula] = []

    def admit(candidates: dict[tuple[Table, ...], Formula]) -> list[Formula]:
        added = []
        for key, a in sorted(candidates.items(), key=lambda kv: kv[1].key()):
            seen[key] = a
            tables[a] = key
            reps.append(a)
            added.append(a)
        if len(reps) > cap:
            raise ResourceLimitError(f"more than {cap} representatives")
        return added

    first: dict[tuple[Table, ...], Formula] = {}
    leaves: list[Formula] = [Var(i) for i in range(1, n + 1)]
    for a in sorted(leaves + [App(c) for c in sig.of_arity(0)], key=Formula.key):
        if isinstance(a, Var):
            key = tuple(var_table(m, n, a.index) for m in ms)
        else:
            key = tuple(apply_table(m, a.connective, [], rows[j]) for j, m in enumerate(ms))
        if key not in first:
            first[key] = a
    frontier = admit(first)
    depth = 1
    work = 0
    while max_depth is None or depth < max_depth:
        depth += 1
        fresh = set(frontier)
        new: dict[tuple[Table, ...], Formula] = {}
        pool = list(reps)
        for c, k in sig.items():
            if k == 0:
                continue
            combos = (
                args for args in itertools.product(pool, repeat=k) if any(a in fresh for a in args)
            )
            for args in combos:
                work += 1
                if work > work_cap:
                    raise ResourceLimitError(f"more than {work_cap} table applications")
                key = tuple(
                    apply_table(m, c, [tables[a][j] for a in args], rows[j])
                    for j, m in enumerate(ms)
                )
                if key in seen:
                    continue
                f = App(c, args)
                old = new.get(key)
                if old is None or f.key() < old.key():
                    new[key] = f
        if not new:
            break
        frontier = admit(new)
    return sorted(reps, key=Formula.key), tables


@dataclass
class ThetaSet:
    n: int
    representatives: list[Formula]
    tables: dict[Formula, tuple[Table, Table]]
    matrices: tuple[NMatrix, NMatrix]

    def __len__(self) -> int:
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)

    def multifunctions(self, a: Formula) -> tuple[MultiFunctionTable, MultiFunctionTable]:
        out = []
        for m, t in zip(self.matrices, self.tables[a]):
            keys = itertools.product(m.values, repeat=self.n)
            out.append(
                MultiFunctionTable(
                    self.n, m.values, {k: frozenset([m.values[v]]) for k, v in zip(keys, t)}
                )
            )
        return out[0], out[1]


def build_theta(m1: NMatrix, m2: NMatrix, n: int, cap: int = DEFAULT_THETA_CAP) -> ThetaSet:
    """Finite Θ ⊆ L(P_n) with one representative per expressible pair of n-place functions."""
    _require_deterministic(m1, m2)
    _require_same_signature(m1, m2)
    reps, tables = function_closure([m1, m2], n, cap)
    return ThetaSet(n, reps, tables, (m1, m2))


@dataclass(frozen=True)
class InclusionResult:
    """Truthy iff ⊢_{M1} ⊆ ⊢_{M2}; otherwise carries a separating (Γ, A)."""

    included: bool
    premises: tuple[Formula, ...] = ()
    conclusion: Formula | None = None

    def __bool__(self) -> bool:
        return self.included

    def to_json(self) -> dict:
        d: dict = {"included": self.included}
        if not self.included:
            d["premises"] = [a.text for a in self.premises]
            d["conclusion"] = self.conclusion.text
        return d


def _masks(m: NMatrix, tables: dict[Formula, Table]) -> dict[Formula, int]:
    """Bitmask of the rows where each formula is designated."""
    out = {}
    for a, t in tables.items():
        mask = 0
        for j, v in enumerate(t):
            if m.des_index(v):
                mask |= 1 << j
        out[a] = mask
    return out


def decide_matrix_inclusion(m1: NMatrix, m2: NMatrix, cap: int = DEFAULT_THETA_CAP) -> InclusionResult:
    """Decide ⊢_{M1} ⊆ ⊢_{M2} for deterministic matrices.

    For each assignment x of P_n in M2 the set T of Θ-formulas designated at x
    is the largest premise set that x refutes anything from, so by
    monotonicity it is enough to test T ⊢_{M1} A for the A ∉ T.
    """
    _require_deterministic(m1, m2)
    _require_same_signature(m1, m2)
    n = max(len(m1.values), len(m2.values))
    theta = build_theta(m1, m2, n, cap)
    reps = theta.representatives
    mask1 = _masks(m1, {a: theta.tables[a][0] for a in reps})
    full1 = (1 << (len(m1.values) ** n)) - 1
    rows2 = len(m2.values) ** n
    designated_sets = set()
    for x in range(rows2):
        designated_sets.add(
            frozenset(a for a in reps if m2.des_index(theta.tables[a][1][x]))
        )

    def entails(gamma, a) -> bool:
        both = full1
        for b in gamma:
            both &= mask1[b]
        return both & ~mask1[a] == 0

    best = None
    for t in sorted(designated_sets, key=lambda s: sorted(b.key() for b in s)):
        for a in reps:
            if a in t or not entails(t, a):
                continue
            gamma = sorted(t, key=Formula.key)
            for b in list(gamma):
                trial = [g for g in gamma if g != b]
                if entails(trial, a):
                    gamma = trial
            cand = (len(gamma), a.key(), [g.key() for g in gamma])
            if best is None or cand < best[0]:
                best = (cand, tuple(gamma), a)
    if best is None:
        return InclusionResult(True)
    return InclusionResult(False, best[1], best[2])


@dataclass(frozen=True)
class EquivalenceResult:
    """Truthy iff the matrices define the same logic.

    When not equivalent, the witness consequence holds in matrix ``holds_in``
    (1 or 2) and fails in the other.
    """

    equivalent: bool
    premises: tuple[Formula, ...] = ()
    conclusion: Formula | None = None
    holds_in: int | None = None

    def __bool__(self) -> bool:
        return self.equivalent

    def to_json(self) -> dict:
        d: dict = {"equivalent": self.equivalent}
        if not self.equivalent:
            d["premises"] = [a.text for a in self.premises]
            d["conclusion"] = self.conclusion.text
            d["holds_in"] = self.holds_in
        return d


def decide_matrix_equivalence(m1: NMatrix, m2: NMatrix, cap: int = DEFAULT_THETA_CAP) -> EquivalenceResult:
    r = decide_matrix_inclusion(m1, m2, cap)
    if not r:
        return EquivalenceResult(False, r.premises, r.conclusion, 1)
    r = decide_matrix_inclusion(m2, m1, cap)
    if not r:
        return EquivalenceResult(False, r.premises, r.conclusion, 2)
    return EquivalenceResult(True)


def matrix_theorem_existence(m: NMatrix, cap: int = DEFAULT_THETA_CAP) -> Formula | None:
    """Canonically first one-variable theorem of a deterministic matrix, or None.

    One variable suffices by substitution-invariance; the closure over
    one-place function tables is finite.
    """
    _require_deterministic(m)
    reps, tables = function_closure([m], 1, cap)
    for a in reps:
        if all(m.des_index(v) for v in tables[a][0]):
            return a
    return None
