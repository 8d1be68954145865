"""Signatures, formulas, substitutions and the canonical formula order.

Formulas are immutable trees.  Every formula carries its depth, node count
and canonical text, and the canonical order compares them by that triple.
Leaves (variables and 0-ary applications) have depth 1.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Mapping

VAR_RE = re.compile(r"p[1-9][0-9]*\Z")
NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_^]*\Z")


class SignatureError(ValueError):
    pass


class Signature:
    """Finite map from connective name to arity."""

    __slots__ = ("_arity",)

    def __init__(self, connectives: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = connectives.items() if isinstance(connectives, Mapping) else connectives
        arity: dict[str, int] = {}
        for name, k in items:
            if not isinstance(name, str) or not NAME_RE.match(name):
                raise SignatureError(f"invalid connective name {name!r}")
            if VAR_RE.match(name):
                raise SignatureError(f"connective name {name!r} clashes with the variable pattern")
            if name in arity:
                raise SignatureError(f"duplicate connective {name!r}")
            if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                raise SignatureError(f"invalid arity {k!r} for {name!r}")
            arity[name] = k
        self._arity = arity

    def arity(self, name: str) -> int:
        return self._arity[name]

    def __contains__(self, name: object) -> bool:
        return name in self._arity

    def __iter__(self) -> Iterator[str]:
        return iter(self._arity)

    def __len__(self) -> int:
        return len(self._arity)

    def items(self):
        return self._arity.items()

    def of_arity(self, k: int) -> list[str]:
        return [c for c, a in self._arity.items() if a == k]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Signature) and self._arity == other._arity

    def __hash__(self) -> int:
        return hash(frozenset(self._arity.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{c}/{a}" for c, a in self._arity.items())
        return f"Signature({inner})"

    def to_json(self) -> dict:
        return {"connectives": [{"name": c, "arity": a} for c, a in sorted(self._arity.items())]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Signature":
        try:
            entries = data["connectives"]
            return cls((e["name"], e["arity"]) for e in entries)
        except (KeyError, TypeError) as exc:
            raise SignatureError(f"malformed signature JSON: {exc}") from exc


class Formula:
    """Base class of :class:`Var` and :class:`App`."""

    __slots__ = ("depth", "size", "_hash", "_text")

    def key(self) -> tuple[int, int, str]:
        """Canonical sort key: (depth, node count, canonical text)."""
        return (self.depth, self.size, self.text)

    def __lt__(self, other: "Formula") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "Formula") -> bool:
        return self.key() <= other.key()

    def __gt__(self, other: "Formula") -> bool:
        return self.key() > other.key()

    def __ge__(self, other: "Formula") -> bool:
        return self.key() >= other.key()

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return self.text


class Var(Formula):
    __slots__ = ("index",)

    def __init__(self, index: int):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"variable index must be a positive integer, got {index!r}")
        self.index = index
        self.depth = 1
        self.size = 1
        self._text = None
        self._hash = hash(("var", index))

    @property
    def text(self) -> str:
        return f"p{self.index}"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and other.index == self.index

    __hash__ = Formula.__hash__

    def __repr__(self) -> str:
        return f"Var({self.index})"


class App(Formula):
    __slots__ = ("connective", "args")

    def __init__(self, connective: str, args: Iterable[Formula] = ()):
        self.connective = connective
        self.args = tuple(args)
        self.depth = 1 + max((a.depth for a in self.args), default=0)
        self.size = 1 + sum(a.size for a in self.args)
        self._text = None
        self._hash = hash((connective, self.args))

    @property
    def text(self) -> str:
        if self._text is None:
            if self.args:
                self._text = f"{self.connective}({','.join(a.text for a in self.args)})"
            else:
                self._text = self.connective
        return self._text

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.connective == other.connective
            and self.args == other.args
        )

    __hash__ = Formula.__hash__

    def __repr__(self) -> str:
        return f"App({self.connective!r}, {list(self.args)!r})"


def check_formula(a: Formula, sig: Signature) -> None:
    """Raise :class:`FormulaError` unless ``a`` is well-formed under ``sig``."""
    for b in _walk(a):
        if isinstance(b, App):
            if b.connective not in sig:
                raise UnknownConnectiveError(f"unknown connective {b.connective!r}")
            if sig.arity(b.connective) != len(b.args):
                raise ArityError(
                    f"{b.connective!r} expects {sig.arity(b.connective)} arguments, got {len(b.args)}"
                )


def _walk(a: Formula) -> Iterator[Formula]:
    stack = [a]
    while stack:
        b = stack.pop()
        yield b
        if isinstance(b, App):
            stack.extend(b.args)


def subformulas(a: Formula) -> list[Formula]:
    """sub(A) in canonical order; ``a`` itself is the last element."""
    return sorted(set(_walk(a)), key=Formula.key)


def subformulas_of_all(formulas: Iterable[Formula]) -> list[Formula]:
    out: set[Formula] = set()
    for a in formulas:
        out.update(_walk(a))
    return sorted(out, key=Formula.key)


def variables(a: Formula) -> set[int]:
    return {b.index for b in _walk(a) if isinstance(b, Var)}


def is_closed(a: Formula) -> bool:
    return not variables(a)


Substitution = Mapping[int, Formula]


def apply_substitution(sigma: Substitution, a: Formula) -> Formula:
    """Homomorphic replacement of variables; identity outside ``sigma``'s support."""
    memo: dict[Formula, Formula] = {}

    def go(b: Formula) -> Formula:
        if b in memo:
            return memo[b]
        if isinstance(b, Var):
            r = sigma.get(b.index, b)
        else:
            r = App(b.connective, [go(x) for x in b.args])
        memo[b] = r
        return r

    return go(a)


def compose(tau: Substitution, sigma: Substitution) -> dict[int, Formula]:
    """The substitution ``tau ∘ sigma``: first ``sigma``, then ``tau``."""
    out = {i: apply_substitution(tau, b) for i, b in sigma.items()}
    for i, b in tau.items():
        out.setdefault(i, b)
    return out


# --------------------------------------------------------------------------
# parsing

class FormulaError(ValueError):
    code = "formula-error"


class FormulaSyntaxError(FormulaError):
    code = "syntax-error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownConnectiveError(FormulaError):
    code = "unknown-connective"


class ArityError(FormulaError):
    code = "arity-mismatch"


_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_^]*)|(?P<punct>[(),])|(?P<bad>\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise FormulaSyntaxError(f"unexpected character {m.group(kind)!r}", start)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse prefix notation such as ``flat(flat(p1))`` or ``zero``."""
    tokens = _tokenize(text)
    i = 0

    def parse() -> Formula:
        nonlocal i
        kind, val, pos = tokens[i]
        if kind == "end":
            raise FormulaSyntaxError("unexpected end of input", pos)
        if kind != "name":
            raise FormulaSyntaxError(f"unexpected {val!r}", pos)
        i += 1
        if VAR_RE.match(val):
            return Var(int(val[1:]))
        if val not in sig:
            raise UnknownConnectiveError(f"unknown connective {val!r} at position {pos}")
        args: list[Formula] = []
        if tokens[i][1] == "(":
            i += 1
            args.append(parse())
            while tokens[i][1] == ",":
                i += 1
                args.append(parse())
            kind2, val2, pos2 = tokens[i]
            if val2 != ")":
                if kind2 == "end":
                    raise FormulaSyntaxError("unexpected end of input", pos2)
                raise FormulaSyntaxError(f"expected ')' but found {val2!r}", pos2)
            i += 1
        if sig.arity(val) != len(args):
            raise ArityError(f"{val!r} expects {sig.arity(val)} arguments, got {len(args)} (position {pos})")
        return App(val, args)

    result = parse()
    kind, val, pos = tokens[i]
    if kind != "end":
        raise FormulaSyntaxError(f"trailing input {val!r}", pos)
    return result


def format_formula(a: Formula) -> str:
    return a.text


def var(i: int) -> Var:
    return Var(i)


# --------------------------------------------------------------------------
# enumeration

def iter_formulas(sig: Signature, nvars: int, depth: int) -> Iterator[Formula]:
    """Formulas over p1..p_nvars of depth at most ``depth`` in canonical order.

    Depth is the primary sort key, so each level is built and sorted only
    when the previous one has been consumed.
    """
    if depth < 1:
        return
    level: list[Formula] = [Var(i) for i in range(1, nvars + 1)]
    level += [App(c) for c in sig.of_arity(0)]
    level.sort(key=Formula.key)
    upto = list(level)
    yield from level
    for d in range(2, depth + 1):
        new: list[Formula] = []
        for c, k in sig.items():
            if k == 0:
                continue
            # at least one argument of depth exactly d - 1
            for args in itertools.product(upto, repeat=k):
                if any(a.depth == d - 1 for a in args):
                    new.append(App(c, args))
        if not new:
            return
        new.sort(key=Formula.key)
        yield from new
        upto += new


def formulas_up_to_depth(sig: Signature, nvars: int, depth: int) -> list[Formula]:
    """All formulas over p1..p_nvars of depth at most ``depth``, canonically sorted."""
    return list(iter_formulas(sig, nvars, depth))


def count_formulas_up_to_depth(sig: Signature, nvars: int, depth: int) -> int:
    """Closed-form recurrence N(d) = leaves + sum_k |Σ^(k)| N(d-1)^k."""
    if depth < 1:
        return 0
    leaves = nvars + len(sig.of_arity(0))
    n = leaves
    for _ in range(2, depth + 1):
        n = leaves + sum(len(sig.of_arity(k)) * n ** k for k in {a for _, a in sig.items()} if k > 0)
    return n
