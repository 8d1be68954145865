"""Bundled example Nmatrices, rule sets and counter machines.

Every entry is rebuilt from the literal tables below on load and checked
against an embedded checksum of its canonical JSON.  Tilded entries are
computed with :func:`tilde` and compared with hand-written tables.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .analyzer import Rule, RuleSet
from .constructions import tilde, unconstrained
from .formula import Signature, parse_formula
from .machines import CounterMachine, Inc, Test
from .semantics import NMatrix

Artifact = Union[NMatrix, CounterMachine, RuleSet]


class CorpusIntegrityError(RuntimeError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    artifact: Artifact
    provenance: str

    @property
    def kind(self) -> str:
        if isinstance(self.artifact, NMatrix):
            return "nmatrix"
        if isinstance(self.artifact, CounterMachine):
            return "machine"
        return "rules"


FLAT = Signature({"flat": 1})
IMP = Signature({"imp": 2})
KSIG = Signature([("neg", 1), ("box", 1), ("or", 2), ("imp", 2)])

# flat(0) | flat(1), one string of outputs per argument
FLAT_TABLES = {
    "U": ("01", "01"),
    "M1": ("01", "0"),
    "M2": ("01", "1"),
    "M3": ("0", "01"),
    "M4": ("0", "0"),
    "M5": ("0", "1"),
    "M6": ("1", "01"),
    "M7": ("1", "0"),
    "M8": ("1", "1"),
}

# flat over 0, 0~, 1 as printed for the tilded variants; "t" stands for 0~
TILDED_FLAT_TABLES = {
    "U": ("0t1", "0t1", "0t1"),
    "M1": ("0t1", "0t1", "0t"),
    "M2": ("0t1", "0t1", "1"),
    "M3": ("0t", "0t", "0t1"),
    "M4": ("0t", "0t", "0t"),
    "M5": ("0t", "0t", "1"),
    "M6": ("1", "1", "0t1"),
    "M7": ("1", "1", "0t"),
    "M8": ("1", "1", "1"),
}

K_OR = {
    "F": ("F", "f", "t", "T"),
    "f": ("f", "f", "tT", "T"),
    "t": ("t", "tT", "tT", "T"),
    "T": ("T", "T", "T", "T"),
}
K_IMP = {
    "F": ("T", "T", "T", "T"),
    "f": ("t", "tT", "tT", "T"),
    "t": ("f", "f", "tT", "T"),
    "T": ("F", "f", "t", "T"),
}
K_NEG = {"F": "T", "f": "t", "t": "f", "T": "F"}
K_BOX = {"F": "Ff", "f": "Ff", "t": "Ff", "T": "tT"}

I_IMP = {("0", "0"): "1", ("0", "1"): "1", ("1", "0"): "0", ("1", "1"): "1"}
TILDED_I_IMP = {
    "0": ("1", "1", "1"),
    "t": ("1", "1", "1"),
    "1": ("0t", "0t", "1"),
}

RULES = {
    "r1": (["p1", "flat(p1)"], "p2"),
    "r2": (["p1"], "flat(p1)"),
    "r3": (["flat(p1)"], "p1"),
    "r4": (["flat(p1)"], "p2"),
    "r5": (["p1"], "flat(flat(p1))"),
    "r6": (["flat(flat(p1))"], "p1"),
    "r7": ([], "flat(p1)"),
}
RULE_SETS = {
    "U": [],
    "M1": ["r1"],
    "M2": ["r2"],
    "M3": ["r3"],
    "M4": ["r4"],
    "M5": ["r2", "r3"],
    "M7": ["r1", "r5", "r6"],
    "M8": ["r7"],
}


def flat_matrix(t0: str, t1: str) -> NMatrix:
    return NMatrix(FLAT, ["0", "1"], ["1"], {"flat": {("0",): list(t0), ("1",): list(t1)}})


def kearns() -> NMatrix:
    vals = ["F", "f", "t", "T"]
    return NMatrix(
        KSIG,
        vals,
        ["t", "T"],
        {
            "neg": {(x,): [K_NEG[x]] for x in vals},
            "box": {(x,): list(K_BOX[x]) for x in vals},
            "or": {(x, y): list(K_OR[x][j]) for x in vals for j, y in enumerate(vals)},
            "imp": {(x, y): list(K_IMP[x][j]) for x in vals for j, y in enumerate(vals)},
        },
    )


def implication() -> NMatrix:
    return NMatrix(IMP, ["0", "1"], ["1"], {"imp": {k: [v] for k, v in I_IMP.items()}})


def _tilded_from_print(interp: dict) -> tuple[frozenset, dict]:
    """Content of a hand-written tilded table, independent of value order."""
    name = {"0": "0", "t": "0~", "1": "1"}
    return frozenset({"0~", "1"}), {
        c: {tuple(name[a] for a in args): frozenset(name[o] for o in outs) for args, outs in rows.items()}
        for c, rows in interp.items()
    }


def _content(m: NMatrix) -> tuple[frozenset, dict]:
    return m.designated, {
        c: {args: frozenset(outs) for args, outs in rows.items()} for c, rows in m.interpretation.items()
    }


def duplicate_value_m7() -> NMatrix:
    """M7 with a second copy 0' of the value 0; still a deterministic matrix."""
    return NMatrix(
        FLAT,
        ["0", "0'", "1"],
        ["1"],
        {"flat": {("0",): ["1"], ("0'",): ["1"], ("1",): ["0"]}},
    )


def rule(name: str) -> Rule:
    prem, concl = RULES[name]
    return Rule(tuple(parse_formula(p, FLAT) for p in prem), parse_formula(concl, FLAT), name)


MACHINES = {
    "INC1": CounterMachine(1, ("q0", "q1"), "q0", {"q0": Inc(1, "q1")}),
    "LOOP": CounterMachine(1, ("q0",), "q0", {"q0": Inc(1, "q0")}),
    "INCTEST": CounterMachine(
        1, ("q0", "q1", "q2"), "q0", {"q0": Inc(1, "q1"), "q1": Test(1, "q2", "q2")}
    ),
}


def canonical_json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def checksum(artifact: Artifact) -> str:
    return hashlib.sha256(canonical_json(artifact.to_json()).encode()).hexdigest()


def _build() -> list[CorpusEntry]:
    out: list[CorpusEntry] = []
    base: dict[str, NMatrix] = {}
    for name, (t0, t1) in FLAT_TABLES.items():
        m = unconstrained(FLAT) if name == "U" else flat_matrix(t0, t1)
        base[name] = m
        out.append(CorpusEntry(name, m, "single unary connective, nine refinements of U"))
    for name, m in base.items():
        out.append(CorpusEntry(f"tilde_{name}", tilde(m), f"tilde of {name}"))
    k = kearns()
    out.append(CorpusEntry("K", k, "Kearns four-valued modal Nmatrix"))
    i = implication()
    out.append(CorpusEntry("I", i, "two-valued implication matrix"))
    out.append(CorpusEntry("tilde_I", tilde(i), "tilde of I"))
    for name, rs in RULE_SETS.items():
        out.append(CorpusEntry(f"R_{name}", RuleSet(tuple(rule(r) for r in rs), FLAT), f"axiomatization of {name}"))
    for name, c in MACHINES.items():
        out.append(CorpusEntry(name, c, "counter machine"))
    return out


def _self_check(entries: list[CorpusEntry]) -> None:
    by_name = {e.name: e.artifact for e in entries}
    problems = []
    for e in entries:
        want = CHECKSUMS.get(e.name)
        if want is None or checksum(e.artifact) != want:
            problems.append(f"checksum mismatch for {e.name}")
    for name, rows in TILDED_FLAT_TABLES.items():
        printed = {"flat": {(a,): outs for a, outs in zip("0t1", rows)}}
        if _content(by_name[f"tilde_{name}"]) != _tilded_from_print(printed):
            problems.append(f"tilde_{name} disagrees with the printed table")
        if tilde(by_name[name]) != by_name[f"tilde_{name}"]:
            problems.append(f"tilde_{name} is not tilde({name})")
    printed = {"imp": {(a, b): TILDED_I_IMP[a][j] for a in "0t1" for j, b in enumerate("0t1")}}
    if _content(by_name["tilde_I"]) != _tilded_from_print(printed):
        problems.append("tilde_I disagrees with the printed table")
    if problems:
        raise CorpusIntegrityError("; ".join(problems))


@lru_cache(maxsize=1)
def load_corpus() -> tuple[CorpusEntry, ...]:
    entries = _build()
    _self_check(entries)
    return tuple(entries)


def get(name: str) -> Artifact:
    for e in load_corpus():
        if e.name == name:
            return e.artifact
    raise KeyError(f"no corpus entry named {name!r}")


def names(kind: str | None = None) -> list[str]:
    return [e.name for e in load_corpus() if kind is None or e.kind == kind]


FLAT_FAMILY = ("U", "M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8") + tuple(
    f"tilde_{n}" for n in FLAT_TABLES
)

CHECKSUMS: dict[str, str] = {
    "U": "614cd64847b560a5d9a850d1972536e389553346997c3a7d2b7124297ca406b8",
    "M1": "d5056aaa98f4423ac779264ff53c98647af00bd06ca05ec642dce0139ce7f0a2",
    "M2": "40c32971baf360f87ec0f25b3a367dffea0e3d0f65fd8a6effc11423663ca26e",
    "M3": "5c4270715d7f5ae823852bce793d31ebfae511a600578e1674dbcc6999bfbbf9",
    "M4": "3f9097d7553a14b2608683a7316247960f603ca02f43d48095975e4d9b887a7a",
    "M5": "9c24409abaf85e0f0c416038767517476c4a8b8d23a8298b9c53b74f8d5fbda7",
    "M6": "001892f5080a5b590c1e2550488e9711dd7c5195e187c518226815917a38d5c8",
    "M7": "c5d3e172602e7b3b0290128fd0aae8b1beb6555e58e158addda3d85dc8adb458",
    "M8": "319505d12c5bd503cede107afa3b1322dab48e2556a5d0302d50e10c412afa44",
    "tilde_U": "6039fc4aab06df0ca8c483403c979c083ed3f37d9ca204c9ca4b7d3df7031362",
    "tilde_M1": "343ffcc78458175767990c02c5d93e10772f2c81805793a0d09477378c17a5a9",
    "tilde_M2": "ef18a1281015c5151cb17dfcdeb89fd660d8a0f16f7ef85b4bd6c705fc855a93",
    "tilde_M3": "6f4b6b4863d86c9536a47a68e96da7c7dd43e73463c2bf4eccaa4be64aab55a5",
    "tilde_M4": "9b32432b0a9e8ce6489c45a02dd853abe7e53870a4484d95e1481f5d2bcd7b8f",
    "tilde_M5": "ec8324bdaf61a4fa3b955fa3f44307d630c384b28c22fce701efef939ff93968",
    "tilde_M6": "89af5d86d80420c21c416b7be6b9de19d2934fd5ae6fc9ff0d696e849efa9c99",
    "tilde_M7": "469a86d35ff21a16e79bc286ced1b4c5a70f2139e9b567d1fd708be6563dab59",
    "tilde_M8": "2737c32a2f634f4a2378796e0115a0396ccf38e73f647d0b8aed803f425ef4f6",
    "K": "49ae6cf7ec70c551483f6adb93cdc9a3503c1dd92b9bc61de5d745227bdcd69e",
    "I": "20202bd500692bdc5f5183f6bb8f90c7b75aca1cb0f75fbfad303f7b6f4a80ba",
    "tilde_I": "cf257bf232eb5c5e16e2451f1bec6f5c0208d60c8702f54c6e7225072d000d81",
    "R_U": "052aef5f75ab8e124ab83eadc66d1397c234d2bebfe6d09f4eaaf4b4e862d3e6",
    "R_M1": "cd3046948651b9348eb604051d1d58c10365ec74fdd8deafe275d332397e3763",
    "R_M2": "fe273a472b9078e1ec90044d2718fa8091cb5e6409f209e471aee5323b58a5a3",
    "R_M3": "19e7783502ddf31f3a11b87916cb470f088beeddeea28787f35070e46a877333",
    "R_M4": "91026e235d4341b03bfde6074cf14087fec5d65f283e3d0eea0a93df0c52415a",
    "R_M5": "6e7166a4952b4d3fdcd73d9dbf1c3e2d205603564cf22ea9f644a7e528c9bc6e",
    "R_M7": "9eadd2686d66d487ffbfe0a943ef5c391b001c49ad76b8f2f2ec2cd5b306d614",
    "R_M8": "e9cddb1ed9534846aa8dc0293ba4f54dd58f8e253dc82c4fadb27998801cd9ee",
    "INC1": "5b21cd21fdd407acf75e4e864053df07a7d558ad8e12b1a3ac7ba722207dcf1c",
    "LOOP": "4823dc13be00703de6d55e41f37a50b0210f9118ed2840e5cabc6c45e314a888",
    "INCTEST": "d5e5f2eaa75fb62b9909c9192348fde63aede8a4608bc22f031787dfaa54a35d",
}
