"""Best-effort equivalence analysis of arbitrary finite Nmatrices.

Equivalence of Nmatrices is undecidable in general, so ``analyze`` returns
one of three outcomes.  Equivalent and NotEquivalent always come with
evidence that can be re-checked independently; Unknown reports what was tried.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .constructions import (
    certify_no_theorems,
    enumerate_strict_homs,
    is_unconstrained,
    tilde,
)
from .deterministic import (
    ResourceLimitError,
    apply_table,
    var_table,
    decide_matrix_equivalence,
    function_closure,
)
from .formula import Formula, Signature, Var, formulas_up_to_depth, iter_formulas, parse_formula
from .semantics import ConsequenceResult, NMatrix, SignatureMismatch, decide_consequence, is_theorem

EQUIVALENT = "Equivalent"
NOT_EQUIVALENT = "NotEquivalent"
UNKNOWN = "Unknown"


# --------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class Rule:
    premises: tuple[Formula, ...]
    conclusion: Formula
    name: str | None = None

    def __str__(self) -> str:
        prem = ", ".join(a.text for a in self.premises)
        return f"{{{prem}}} / {self.conclusion.text}"

    def to_json(self) -> dict:
        d: dict = {"premises": [a.text for a in self.premises], "conclusion": self.conclusion.text}
        if self.name is not None:
            d["name"] = self.name
        return d


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...] = ()
    signature: Signature | None = None

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def to_json(self) -> dict:
        d: dict = {}
        if self.signature is not None:
            d["signature"] = self.signature.to_json()
        d["rules"] = [r.to_json() for r in self.rules]
        return d

    @classmethod
    def from_json(cls, data: Mapping, sig: Signature | None = None) -> "RuleSet":
        if sig is None:
            if "signature" not in data:
                raise ValueError("rule set has no signature; supply one")
            sig = Signature.from_json(data["signature"])
        rules = []
        for r in data.get("rules", []):
            rules.append(
                Rule(
                    tuple(parse_formula(p, sig) for p in r.get("premises", [])),
                    parse_formula(r["conclusion"], sig),
                    r.get("name"),
                )
            )
        return cls(tuple(rules), sig)


@dataclass(frozen=True)
class RuleReport:
    rule: Rule
    result: ConsequenceResult

    @property
    def holds(self) -> bool:
        return self.result.holds

    def to_json(self) -> dict:
        d = self.rule.to_json()
        d.update(self.result.to_json())
        return d


def _same_signature(m1: NMatrix, m2: NMatrix) -> None:
    if m1.signature != m2.signature:
        raise SignatureMismatch(f"{m1.signature!r} vs {m2.signature!r}")


def check_rule_set(m: NMatrix, rules: RuleSet | Iterable[Rule]) -> list[RuleReport]:
    """Decide each rule Γ/A of ``rules`` as a consequence of ``m``."""
    return [RuleReport(r, decide_consequence(m, r.premises, r.conclusion)) for r in rules]


@dataclass(frozen=True)
class AxiomatizedInclusion:
    included: bool
    failing: RuleReport | None = None
    # the rules are assumed, not checked, to axiomatize the first logic
    trusted: str = "rule set assumed to axiomatize the first logic"

    def __bool__(self) -> bool:
        return self.included

    def to_json(self) -> dict:
        d: dict = {"included": self.included, "trusted": self.trusted}
        if self.failing is not None:
            d["failing_rule"] = self.failing.to_json()
        return d


def inclusion_from_axiomatization(rules: RuleSet | Iterable[Rule], m2: NMatrix) -> AxiomatizedInclusion:
    """⊢_1 ⊆ ⊢_{M2} for the logic axiomatized by ``rules``: every rule must hold in M2."""
    for rep in check_rule_set(m2, rules):
        if not rep.holds:
            return AxiomatizedInclusion(False, rep)
    return AxiomatizedInclusion(True)


# --------------------------------------------------------------------------
# bounded searches


@dataclass(frozen=True)
class Budget:
    depth: int = 3
    vars: int = 2
    premises: int = 2

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Counterexample:
    premises: tuple[Formula, ...]
    conclusion: Formula
    holds_in: int
    witness: ConsequenceResult

    def to_json(self) -> dict:
        return {
            "premises": [a.text for a in self.premises],
            "conclusion": self.conclusion.text,
            "holds_in": self.holds_in,
            "fails_in": 3 - self.holds_in,
            "witness": self.witness.witness.to_json(),
        }


def search_counterexample(m1: NMatrix, m2: NMatrix, budget: Budget = Budget()) -> Counterexample | None:
    """First (Γ, A) on which the two consequence relations differ, or None.

    Candidates run by premise-set size, then premise sets in canonical
    lexicographic order, then conclusions in canonical order.  None only
    means nothing was found within the budget.
    """
    _same_signature(m1, m2)
    if m1 == m2:
        return None
    forms = formulas_up_to_depth(m1.signature, budget.vars, budget.depth)
    for s in range(budget.premises + 1):
        for gamma in itertools.combinations(forms, s):
            gs = set(gamma)
            for a in forms:
                if a in gs:
                    continue
                r1 = decide_consequence(m1, gamma, a)
                r2 = decide_consequence(m2, gamma, a)
                if r1.holds != r2.holds:
                    if r1.holds:
                        return Counterexample(gamma, a, 1, r2)
                    return Counterexample(gamma, a, 2, r1)
    return None


MAX_REFINEMENTS = 64


def deterministic_refinements(m: NMatrix, limit: int = MAX_REFINEMENTS) -> list[NMatrix]:
    """Deterministic matrices whose valuations are all valuations of ``m``.

    All of them when there are at most ``limit``, otherwise a fixed sample
    that rotates through the allowed outputs.
    """
    rows = [
        (c, key)
        for c, k in m.signature.items()
        for key in itertools.product(range(len(m.values)), repeat=k)
    ]
    choices = [m.out(c, key) for c, key in rows]
    total = 1
    for ch in choices:
        total *= len(ch)
        if total > limit:
            break
    if total <= limit:
        picks = list(itertools.product(*choices))
    else:
        width = max(len(ch) for ch in choices)
        picks = []
        for r in range(width):
            picks.append(tuple(ch[r % len(ch)] for ch in choices))
            picks.append(tuple(ch[(r + j) % len(ch)] for j, ch in enumerate(choices)))
        picks = list(dict.fromkeys(picks))
    out = []
    for pick in picks:
        interp: dict[str, dict] = {c: {} for c in m.signature}
        for (c, key), o in zip(rows, pick):
            interp[c][tuple(m.values[i] for i in key)] = (m.values[o],)
        out.append(NMatrix(m.signature, m.values, m.designated, interp))
    return out


def search_theorem_bounded(m: NMatrix, depth: int, nvars: int = 1) -> Formula | None:
    """Canonically first theorem of depth <= ``depth`` over p1..p_nvars, or None.

    A theorem of ``m`` is designated everywhere in each deterministic
    refinement.  The tables reachable within the depth bound are closed
    separately per refinement; if one refinement reaches no all-designated
    table there is no theorem within the bound.  Otherwise formulas are
    enumerated in canonical order and only those passing every computed
    filter reach the consequence check.
    """
    if not m.designated:
        return None
    filters = []
    for r in deterministic_refinements(m):
        try:
            reps, tables = function_closure([r], nvars, max_depth=depth)
        except ResourceLimitError:
            continue
        good = {tables[a][0] for a in reps if all(r.des_index(v) for v in tables[a][0])}
        if not good:
            return None
        if m.deterministic:
            return next(a for a in reps if tables[a][0] in good)
        filters.append((r, good))
    return _first_theorem(m, depth, nvars, filters)


def _first_theorem(m, depth, nvars, filters) -> Formula | None:
    memo: dict[Formula, tuple] = {}

    def key_of(a: Formula):
        k = memo.get(a)
        if k is None:
            if isinstance(a, Var):
                k = tuple(var_table(r, nvars, a.index) for r, _ in filters)
            else:
                argk = [key_of(b) for b in a.args]
                k = tuple(
                    apply_table(r, a.connective, [ak[j] for ak in argk], len(r.values) ** nvars)
                    for j, (r, _) in enumerate(filters)
                )
            memo[a] = k
        return k

    for a in iter_formulas(m.signature, nvars, depth):
        k = key_of(a)
        if all(t in good for t, (_, good) in zip(k, filters)) and is_theorem(m, a):
            return a
    return None


# --------------------------------------------------------------------------
# the pipeline


STAGES = (
    (1, "deterministic-decision"),
    (2, "strongly-preserving-hom"),
    (3, "strict-homs-both-ways"),
    (4, "tilde-no-theorems"),
    (5, "counterexample-search"),
    (6, "unknown"),
)


@dataclass
class Verdict:
    outcome: str
    stage: int
    evidence: dict
    attempted: list[str] = field(default_factory=list)
    budget: Budget = field(default_factory=Budget)

    @property
    def stage_name(self) -> str:
        return dict(STAGES)[self.stage]

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "stage": self.stage,
            "stage_name": self.stage_name,
            "evidence": self.evidence,
            "attempted": list(self.attempted),
            "budget": self.budget.to_json(),
        }


def analyze(
    m1: NMatrix,
    m2: NMatrix,
    budget: Budget = Budget(),
    tilde_of: Sequence[NMatrix] | NMatrix | None = None,
    corpus: Sequence[NMatrix] | Sequence[tuple[str, NMatrix]] = (),
) -> Verdict:
    """Run the fixed pipeline of sufficient conditions, cheapest first.

    ``tilde_of`` names matrices N that the caller claims one side is the
    tilde of; the claim is verified before use.  ``corpus`` supplies
    candidate theorem-free matrices for the no-theorem certificate.
    """
    _same_signature(m1, m2)
    attempted: list[str] = []

    def verdict(outcome, stage, evidence):
        return Verdict(outcome, stage, evidence, attempted, budget)

    attempted.append("deterministic-decision")
    if m1.deterministic and m2.deterministic:
        r = decide_matrix_equivalence(m1, m2)
        return verdict(EQUIVALENT if r else NOT_EQUIVALENT, 1, r.to_json())

    attempted.append("strongly-preserving-hom")
    for src, (a, b) in ((1, (m1, m2)), (2, (m2, m1))):
        homs = enumerate_strict_homs(a, b, strong_only=True)
        if homs:
            return verdict(EQUIVALENT, 2, {"from": src, "to": 3 - src, "hom": homs[0].to_json()})

    attempted.append("strict-homs-both-ways")
    h12 = enumerate_strict_homs(m1, m2)
    h21 = enumerate_strict_homs(m2, m1) if h12 else []
    if h12 and h21:
        return verdict(EQUIVALENT, 3, {"hom_1_to_2": h12[0].to_json(), "hom_2_to_1": h21[0].to_json()})

    attempted.append("tilde-no-theorems")
    if tilde_of is not None:
        bases = [tilde_of] if isinstance(tilde_of, NMatrix) else list(tilde_of)
        for side, (t, u) in ((1, (m1, m2)), (2, (m2, m1))):
            if not is_unconstrained(u):
                continue
            for base in bases:
                if base.signature != t.signature or tilde(base) != t:
                    continue
                pool = [("tilde-of", base)] + [e if isinstance(e, tuple) else (None, e) for e in corpus]
                cert = certify_no_theorems(base, pool)
                if cert is not None:
                    return verdict(
                        EQUIVALENT,
                        4,
                        {"tilde_side": side, "certificate": cert.to_json()},
                    )

    attempted.append("counterexample-search")
    ce = search_counterexample(m1, m2, budget)
    if ce is not None:
        return verdict(NOT_EQUIVALENT, 5, ce.to_json())

    return verdict(UNKNOWN, 6, {"reason": "no stage was conclusive within the budget"})
