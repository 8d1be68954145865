"""Unconstrained and tilded Nmatrices, and strict homomorphism search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import Signature
from .semantics import NMatrix, NMatrixError, SignatureMismatch, Violation

TILDE = "~"


def unconstrained(sig: Signature) -> NMatrix:
    """U_Σ: values {0,1}, designated {1}, every output {0,1}."""
    vals = ("0", "1")
    interp = {
        c: {args: vals for args in itertools.product(vals, repeat=k)} for c, k in sig.items()
    }
    return NMatrix(sig, vals, ["1"], interp)


def is_unconstrained(m: NMatrix) -> bool:
    """True when ``m`` is U_Σ up to the names of its two values."""
    if len(m.values) != 2 or len(m.designated) != 1:
        return False
    full = frozenset(range(2))
    return all(
        m.outset(c, key) == full
        for c, k in m.signature.items()
        for key in itertools.product(range(2), repeat=k)
    )


def tilde_name(x: str) -> str:
    return x + TILDE


def forget(x: str) -> str:
    """The tilde-forgetful map u on value names."""
    return x[: -len(TILDE)] if x.endswith(TILDE) else x


def tilde(m: NMatrix) -> NMatrix:
    """Add a designated copy x~ of every undesignated value x.

    Each output set is u⁻¹ of the original output on the forgotten arguments.
    """
    clash = [x for x in m.values if x.endswith(TILDE)]
    if clash:
        raise NMatrixError(
            [Violation("reserved-suffix", detail=f"value {clash[0]!r} already ends with {TILDE!r}")]
        )
    undes = [x for x in m.values if x not in m.designated]
    new_values = list(m.values) + [tilde_name(x) for x in undes]
    copies = {x: tilde_name(x) for x in undes}

    def preimage(outs: Iterable[str]) -> list[str]:
        res = []
        for o in outs:
            res.append(o)
            if o in copies:
                res.append(copies[o])
        return res

    interp = {}
    for c, k in m.signature.items():
        interp[c] = {
            args: preimage(m.apply(c, *(forget(a) for a in args)))
            for args in itertools.product(new_values, repeat=k)
        }
    return NMatrix(m.signature, new_values, list(m.designated) + list(copies.values()), interp)


# --------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class HomCandidate:
    source: NMatrix
    target: NMatrix
    mapping: tuple[tuple[str, str], ...]
    strict: bool
    surjective: bool
    strongly_preserving: bool

    @property
    def map(self) -> dict[str, str]:
        return dict(self.mapping)

    def __call__(self, x: str) -> str:
        return self.map[x]

    def to_json(self) -> dict:
        return {
            "map": dict(self.mapping),
            "strict": self.strict,
            "surjective": self.surjective,
            "strongly_preserving": self.strongly_preserving,
        }


def hom_flags(m1: NMatrix, m2: NMatrix, h: dict[str, str]) -> tuple[bool, bool, bool]:
    """(strict, surjective, strongly_preserving) for a total value map ``h``."""
    strict = all((x in m1.designated) == (h[x] in m2.designated) for x in m1.values)
    equal = True
    if strict:
        for c, k in m1.signature.items():
            for args in itertools.product(m1.values, repeat=k):
                image = {h[o] for o in m1.apply(c, *args)}
                target = m2.apply(c, *(h[a] for a in args))
                if not image <= target:
                    strict = False
                    break
                if image != target:
                    equal = False
            if not strict:
                break
    surjective = set(h.values()) == set(m2.values)
    return strict, surjective, strict and surjective and equal


def _check_same_signature(m1: NMatrix, m2: NMatrix) -> None:
    if m1.signature != m2.signature:
        raise SignatureMismatch(f"{m1.signature!r} vs {m2.signature!r}")


def enumerate_strict_homs(m1: NMatrix, m2: NMatrix, strong_only: bool = False) -> list[HomCandidate]:
    """Every strict homomorphism M1 → M2, in lexicographic order of target values.

    The search is exhaustive over all |V2|^|V1| maps; designation is checked
    per value and each table constraint as soon as all values it mentions
    are mapped, which prunes without changing the result.
    """
    _check_same_signature(m1, m2)
    n1, n2 = len(m1.values), len(m2.values)
    # constraint (c, args, outs) becomes checkable once every index in it is assigned
    ready: list[list[tuple[str, tuple[int, ...], tuple[int, ...]]]] = [[] for _ in range(n1)]
    for c, k in m1.signature.items():
        for args in itertools.product(range(n1), repeat=k):
            outs = m1.out(c, args)
            last = max(args + outs)
            ready[last].append((c, args, outs))
    allowed = [
        [y for y in range(n2) if m2.des_index(y) == m1.des_index(x)] for x in range(n1)
    ]
    h = [-1] * n1
    found: list[HomCandidate] = []

    def ok(i: int) -> bool:
        for c, args, outs in ready[i]:
            target = m2.outset(c, tuple(h[a] for a in args))
            if any(h[o] not in target for o in outs):
                return False
        return True

    def go(i: int) -> None:
        if i == n1:
            mapping = {m1.values[x]: m2.values[h[x]] for x in range(n1)}
            strict, surj, strong = hom_flags(m1, m2, mapping)
            assert strict
            if strong or not strong_only:
                found.append(
                    HomCandidate(m1, m2, tuple(mapping.items()), strict, surj, strong)
                )
            return
        for y in allowed[i]:
            h[i] = y
            if ok(i):
                go(i + 1)
        h[i] = -1

    go(0)
    return found


def designation_indicator(m: NMatrix, u_sig: NMatrix) -> dict[str, str]:
    """The map x ↦ 1 if x is designated else 0, into an unconstrained Nmatrix."""
    one = next(iter(u_sig.designated))
    zero = next(x for x in u_sig.values if x != one)
    return {x: (one if x in m.designated else zero) for x in m.values}


# --------------------------------------------------------------------------
# theorem-freeness certificates


@dataclass(frozen=True)
class NoTheoremCertificate:
    """A theorem-free matrix N with a strict hom N → M, hence Thm(M) = ∅."""

    matrix: NMatrix
    hom: HomCandidate
    name: str | None = None

    def to_json(self) -> dict:
        return {"matrix": self.name, "hom": self.hom.to_json()}


def certify_no_theorems(
    m: NMatrix, corpus: Sequence[NMatrix] | Sequence[tuple[str, NMatrix]]
) -> NoTheoremCertificate | None:
    """Look for a deterministic, theorem-free corpus matrix mapping strictly into ``m``.

    Returns None when no corpus entry certifies; that is not evidence of a theorem.
    """
    from .deterministic import matrix_theorem_existence

    for entry in corpus:
        name, n = entry if isinstance(entry, tuple) else (None, entry)
        if n.signature != m.signature or not n.deterministic:
            continue
        if matrix_theorem_existence(n) is not None:
            continue
        homs = enumerate_strict_homs(n, m)
        if homs:
            return NoTheoremCertificate(n, homs[0], name)
    return None
