"""Nmatrices, prevaluations, finite consequence and expressed multi-functions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .formula import (
    App,
    Formula,
    FormulaError,
    Signature,
    SignatureError,
    Var,
    check_formula,
    format_formula,
    parse_formula,
    subformulas,
    subformulas_of_all,
    variables,
)


class NMatrixError(ValueError):
    """Raised for malformed Nmatrices; ``violations`` lists every problem found."""

    def __init__(self, violations: Sequence["Violation"] | str):
        if isinstance(violations, str):
            violations = [Violation("invalid", detail=violations)]
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    connective: str | None = None
    args: tuple | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = ""
        if self.connective is not None:
            where = f" [{self.connective}{'(' + ','.join(self.args) + ')' if self.args is not None else ''}]"
        return f"{self.kind}{where}: {self.detail}" if self.detail else f"{self.kind}{where}"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "connective": self.connective,
            "args": list(self.args) if self.args is not None else None,
            "detail": self.detail,
        }


class NMatrix:
    """A finite Nmatrix ⟨V, D, ·⟩ over a signature.

    ``interpretation`` maps each connective to a mapping from argument tuples
    (of value names) to non-empty collections of value names.  Value order is
    significant: searches try values in this order.
    """

    def __init__(
        self,
        signature: Signature,
        values: Sequence[str],
        designated: Iterable[str],
        interpretation: Mapping[str, Mapping[tuple, Iterable[str]]],
    ):
        self.signature = signature
        self.values = tuple(values)
        des = set(designated)
        problems: list[Violation] = []
        if not self.values:
            problems.append(Violation("empty-values", detail="value set must be non-empty"))
        seen = set()
        for x in self.values:
            if not isinstance(x, str) or not x:
                problems.append(Violation("bad-value-name", detail=repr(x)))
            if x in seen:
                problems.append(Violation("duplicate-value", detail=repr(x)))
            seen.add(x)
        for x in sorted(des - seen):
            problems.append(Violation("unknown-value", detail=f"designated value {x!r} not in values"))
        self.index = {x: i for i, x in enumerate(self.values)}
        self.designated = frozenset(des)
        self._des = tuple(x in des for x in self.values)
        self._tab: dict[str, dict[tuple[int, ...], tuple[int, ...]]] = {}
        for c in interpretation:
            if c not in signature:
                problems.append(Violation("unknown-connective", c, detail="not in signature"))
        n = len(self.values)
        for c, k in signature.items():
            rows = interpretation.get(c)
            if rows is None:
                problems.append(Violation("missing-connective", c, detail="no interpretation given"))
                continue
            tab: dict[tuple[int, ...], tuple[int, ...]] = {}
            for args, outs in rows.items():
                args = tuple(args)
                if len(args) != k:
                    problems.append(Violation("arity-mismatch", c, args, f"expected {k} arguments"))
                    continue
                bad = [a for a in args if a not in self.index]
                if bad:
                    problems.append(Violation("unknown-value", c, args, f"argument {bad[0]!r} not in values"))
                    continue
                outs = list(outs)
                bad = [o for o in outs if o not in self.index]
                if bad:
                    problems.append(Violation("unknown-value", c, args, f"output {bad[0]!r} not in values"))
                    continue
                if not outs:
                    problems.append(Violation("empty-output", c, args, "output set must be non-empty"))
                    continue
                key = tuple(self.index[a] for a in args)
                if key in tab:
                    problems.append(Violation("duplicate-tuple", c, args, "argument tuple listed twice"))
                    continue
                tab[key] = tuple(sorted({self.index[o] for o in outs}))
            if n:
                for key in itertools.product(range(n), repeat=k):
                    if key not in tab:
                        args = tuple(self.values[i] for i in key)
                        problems.append(Violation("missing-tuple", c, args, "no output given"))
            self._tab[c] = tab
        if problems:
            raise NMatrixError(problems)
        self._tabset = {c: {k: frozenset(v) for k, v in t.items()} for c, t in self._tab.items()}

    # -- table access ------------------------------------------------------

    def out(self, connective: str, args: tuple[int, ...]) -> tuple[int, ...]:
        """Output indices of ``connective`` on argument indices, in value order."""
        return self._tab[connective][args]

    def outset(self, connective: str, args: tuple[int, ...]) -> frozenset[int]:
        return self._tabset[connective][args]

    def apply(self, connective: str, *args: str) -> frozenset[str]:
        """Output value names of ``connective`` on argument value names."""
        key = tuple(self.index[a] for a in args)
        return frozenset(self.values[i] for i in self._tab[connective][key])

    def is_designated(self, x: str) -> bool:
        return x in self.designated

    def des_index(self, i: int) -> bool:
        return self._des[i]

    @property
    def deterministic(self) -> bool:
        return all(len(o) == 1 for t in self._tab.values() for o in t.values())

    @property
    def interpretation(self) -> dict[str, dict[tuple[str, ...], frozenset[str]]]:
        return {
            c: {
                tuple(self.values[i] for i in key): frozenset(self.values[i] for i in outs)
                for key, outs in sorted(t.items())
            }
            for c, t in self._tab.items()
        }

    # -- identity ----------------------------------------------------------

    def _canon(self):
        return (
            self.signature,
            self.values,
            self.designated,
            tuple(sorted((c, tuple(sorted(t.items()))) for c, t in self._tab.items())),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NMatrix) and self._canon() == other._canon()

    def __hash__(self) -> int:
        return hash(self._canon())

    def __repr__(self) -> str:
        kind = "matrix" if self.deterministic else "Nmatrix"
        return f"<{kind} |V|={len(self.values)} D={sorted(self.designated)} over {self.signature!r}>"

    def renamed(self, mapping: Mapping[str, str]) -> "NMatrix":
        """Isomorphic copy with value names replaced through ``mapping``."""
        r = lambda x: mapping.get(x, x)  # noqa: E731
        return NMatrix(
            self.signature,
            [r(x) for x in self.values],
            [r(x) for x in self.designated],
            {
                c: {tuple(r(a) for a in args): [r(o) for o in outs] for args, outs in rows.items()}
                for c, rows in self.interpretation.items()
            },
        )

    # -- JSON --------------------------------------------------------------

    def to_json(self) -> dict:
        interp = {}
        for c in sorted(self._tab):
            interp[c] = [
                {
                    "args": [self.values[i] for i in key],
                    "out": [self.values[i] for i in outs],
                }
                for key, outs in sorted(self._tab[c].items())
            ]
        return {
            "signature": self.signature.to_json(),
            "values": list(self.values),
            "designated": [x for x in self.values if x in self.designated],
            "interpretation": interp,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "NMatrix":
        return validate_nmatrix(data)


def validate_nmatrix(raw: Mapping) -> NMatrix:
    """Build a checked :class:`NMatrix` from its JSON form.

    Raises :class:`NMatrixError` listing every violation found.
    """
    problems: list[Violation] = []
    try:
        sig = raw["signature"]
        sig = sig if isinstance(sig, Signature) else Signature.from_json(sig)
    except (KeyError, TypeError, SignatureError) as exc:
        raise NMatrixError([Violation("bad-signature", detail=str(exc))]) from exc
    values = raw.get("values")
    designated = raw.get("designated", [])
    if not isinstance(values, list):
        raise NMatrixError([Violation("bad-values", detail="'values' must be a list")])
    if not isinstance(designated, list):
        raise NMatrixError([Violation("bad-designated", detail="'designated' must be a list")])
    interp_raw = raw.get("interpretation", {})
    interp: dict[str, dict[tuple, list]] = {}
    for c, rows in interp_raw.items():
        table: dict[tuple, list] = {}
        for row in rows:
            args = tuple(row.get("args", ()))
            if args in table:
                problems.append(Violation("duplicate-tuple", c, args, "argument tuple listed twice"))
                continue
            table[args] = list(row.get("out", ()))
        interp[c] = table
    try:
        m = NMatrix(sig, values, designated, interp)
    except NMatrixError as exc:
        problems.extend(exc.violations)
        raise NMatrixError(problems) from None
    if problems:
        raise NMatrixError(problems)
    return m


# --------------------------------------------------------------------------
# prevaluations


@dataclass
class PrevaluationTable:
    """Finite map from formulas to value names."""

    entries: dict[Formula, str] = field(default_factory=dict)

    def __getitem__(self, a: Formula) -> str:
        return self.entries[a]

    def __contains__(self, a: object) -> bool:
        return a in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0].key())

    def to_json(self) -> list[dict]:
        return [{"formula": format_formula(a), "value": x} for a, x in self.items()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], sig: Signature) -> "PrevaluationTable":
        return cls({parse_formula(e["formula"], sig): e["value"] for e in data})


def check_prevaluation(m: NMatrix, t: PrevaluationTable | Mapping[Formula, str]) -> list[Violation]:
    """Violations of subformula-closure or of the valuation condition.

    An empty list means ``t`` is a prevaluation of ``m``.
    """
    entries = t.entries if isinstance(t, PrevaluationTable) else dict(t)
    bad = [x for x in entries.values() if x not in m.index]
    if bad:
        raise NMatrixError([Violation("unknown-value", detail=f"value {bad[0]!r} not in values")])
    out: list[Violation] = []
    for a in sorted(entries, key=Formula.key):
        check_formula(a, m.signature)
        if isinstance(a, Var):
            continue
        missing = [b for b in a.args if b not in entries]
        if missing:
            out.append(Violation("not-subformula-closed", detail=f"{a} present but {missing[0]} missing"))
            continue
        allowed = m.apply(a.connective, *(entries[b] for b in a.args))
        if entries[a] not in allowed:
            out.append(
                Violation(
                    "valuation-condition",
                    a.connective,
                    tuple(entries[b] for b in a.args),
                    f"{a} ↦ {entries[a]} but allowed {sorted(allowed, key=m.index.get)}",
                )
            )
    return out


def is_prevaluation(m: NMatrix, t: PrevaluationTable | Mapping[Formula, str]) -> bool:
    return not check_prevaluation(m, t)


# --------------------------------------------------------------------------
# constraint search over a subformula-closed set


class _Problem:
    """Nodes of a subformula-closed set with per-node domains (value indices)."""

    def __init__(self, m: NMatrix, nodes: list[Formula], domains: list[set[int]]):
        self.m = m
        self.nodes = nodes
        pos = {a: i for i, a in enumerate(nodes)}
        self.children: list[tuple[int, ...] | None] = []
        for a in nodes:
            if isinstance(a, Var):
                self.children.append(None)
            else:
                self.children.append(tuple(pos[b] for b in a.args))
        self.domains = domains
        # parents checked as soon as their last child is assigned
        self.check_after: list[list[int]] = [[] for _ in nodes]
        for i, ch in enumerate(self.children):
            if ch:
                self.check_after[max(ch)].append(i)

    def propagate(self) -> bool:
        """Generalized arc consistency on every node constraint; False if a domain empties."""
        m = self.m
        doms = self.domains
        changed = True
        while changed:
            changed = False
            for i, ch in enumerate(self.children):
                if ch is None:
                    continue
                a = self.nodes[i]
                distinct = sorted(set(ch))
                where = [distinct.index(c) for c in ch]
                sup_parent: set[int] = set()
                sup_child = {c: set() for c in distinct}
                for combo in itertools.product(*(sorted(doms[c]) for c in distinct)):
                    args = tuple(combo[w] for w in where)
                    hit = m.outset(a.connective, args) & doms[i]
                    if hit:
                        sup_parent |= hit
                        for c, v in zip(distinct, combo):
                            sup_child[c].add(v)
                if sup_parent != doms[i]:
                    doms[i] = sup_parent
                    changed = True
                for c in distinct:
                    if sup_child[c] != doms[c]:
                        doms[c] = sup_child[c]
                        changed = True
                if not doms[i]:
                    return False
        return all(doms)

    def solutions(self) -> Iterator[list[int]]:
        """Assignments satisfying every constraint, lexicographically ordered."""
        if not self.propagate():
            return
        m = self.m
        nodes = self.nodes
        children = self.children
        doms = [tuple(sorted(d)) for d in self.domains]
        domsets = [frozenset(d) for d in self.domains]
        check_after = self.check_after
        n = len(nodes)
        assign = [-1] * n

        def candidates(i: int) -> tuple[int, ...]:
            ch = children[i]
            if ch is None:
                return doms[i]
            outs = m.out(nodes[i].connective, tuple(assign[c] for c in ch))
            return tuple(o for o in outs if o in domsets[i])

        def viable(i: int) -> bool:
            for p in check_after[i]:
                outs = m.outset(nodes[p].connective, tuple(assign[c] for c in children[p]))
                if not (outs & domsets[p]):
                    return False
            return True

        stack = [iter(candidates(0))] if n else []
        if not n:
            yield []
            return
        i = 0
        while stack:
            try:
                v = next(stack[-1])
            except StopIteration:
                stack.pop()
                i -= 1
                continue
            assign[i] = v
            if not viable(i):
                continue
            if i == n - 1:
                yield list(assign)
                continue
            i += 1
            stack.append(iter(candidates(i)))


def _require_signature(m: NMatrix, formulas: Iterable[Formula]) -> None:
    for a in formulas:
        try:
            check_formula(a, m.signature)
        except FormulaError as exc:
            raise SignatureMismatch(f"{a}: {exc}") from exc


@dataclass(frozen=True)
class ConsequenceResult:
    """Outcome of a consequence check; truthy iff the consequence holds."""

    holds: bool
    witness: PrevaluationTable | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        d: dict = {"holds": self.holds}
        if self.witness is not None:
            d["witness"] = self.witness.to_json()
        return d


HOLDS = ConsequenceResult(True)


def decide_consequence(m: NMatrix, gamma: Iterable[Formula], a: Formula) -> ConsequenceResult:
    """Decide Γ ⊢_M A by searching for a countermodel over sub(Γ ∪ {A}).

    A failing result carries the canonically first countermodel as a
    prevaluation table.
    """
    premises = set(gamma)
    _require_signature(m, premises | {a})
    if a in premises:
        return HOLDS
    nodes = subformulas_of_all(premises | {a})
    nv = len(m.values)
    des = {i for i in range(nv) if m.des_index(i)}
    undes = set(range(nv)) - des
    domains = []
    for b in nodes:
        if b == a:
            domains.append(set(undes))
        elif b in premises:
            domains.append(set(des))
        else:
            domains.append(set(range(nv)))
    sol = next(_Problem(m, nodes, domains).solutions(), None)
    if sol is None:
        return HOLDS
    return ConsequenceResult(
        False, PrevaluationTable({b: m.values[v] for b, v in zip(nodes, sol)})
    )


def is_theorem(m: NMatrix, a: Formula) -> ConsequenceResult:
    return decide_consequence(m, (), a)


# --------------------------------------------------------------------------
# expressed multi-functions


@dataclass(frozen=True)
class MultiFunctionTable:
    arity: int
    values: tuple[str, ...]
    table: Mapping[tuple[str, ...], frozenset[str]]

    def __call__(self, *xs: str) -> frozenset[str]:
        return self.table[tuple(xs)]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MultiFunctionTable)
            and self.arity == other.arity
            and dict(self.table) == dict(other.table)
        )

    def __hash__(self) -> int:
        return hash((self.arity, frozenset(self.table.items())))

    def to_json(self) -> dict:
        idx = {x: i for i, x in enumerate(self.values)}
        return {
            "arity": self.arity,
            "table": [
                {"args": list(k), "out": sorted(v, key=idx.get)} for k, v in self.table.items()
            ],
        }


def express(m: NMatrix, a: Formula, n: int) -> MultiFunctionTable:
    """The multi-function [A]_M : V^n → 2^V expressed by ``a``."""
    _require_signature(m, [a])
    vs = variables(a)
    if vs and max(vs) > n:
        raise ValueError(f"formula uses p{max(vs)} but arity is {n}")
    nodes = subformulas_of_all([a] + [Var(i) for i in range(1, n + 1)])
    top = nodes.index(a)
    nv = len(m.values)
    table: dict[tuple[str, ...], frozenset[str]] = {}
    for xs in itertools.product(range(nv), repeat=n):
        reach = set()
        for y in range(nv):
            domains = []
            for i, b in enumerate(nodes):
                if i == top:
                    dom = {y}
                    if isinstance(b, Var):
                        dom &= {xs[b.index - 1]}
                elif isinstance(b, Var):
                    dom = {xs[b.index - 1]}
                else:
                    dom = set(range(nv))
                domains.append(dom)
            if next(_Problem(m, nodes, domains).solutions(), None) is not None:
                reach.add(y)
        table[tuple(m.values[x] for x in xs)] = frozenset(m.values[y] for y in reach)
    return MultiFunctionTable(n, m.values, table)
