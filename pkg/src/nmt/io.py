"""Reading and writing artifacts as JSON files or ``corpus:NAME`` references."""

from __future__ import annotations

import json
from pathlib import Path

from .analyzer import RuleSet
from .corpus import Artifact, canonical_json, get
from .formula import Signature
from .machines import CounterMachine
from .semantics import validate_nmatrix

CORPUS_SCHEME = "corpus:"


class ArtifactError(ValueError):
    pass


def parse_artifact(data, signature: Signature | None = None) -> Artifact:
    """Dispatch on the JSON shape: Nmatrix, counter machine or rule set."""
    if not isinstance(data, dict):
        raise ArtifactError("artifact JSON must be an object")
    if "values" in data:
        return validate_nmatrix(data)
    if "counters" in data:
        return CounterMachine.from_json(data)
    if "rules" in data:
        return RuleSet.from_json(data, signature)
    raise ArtifactError("unrecognized artifact: expected 'values', 'counters' or 'rules'")


def load_artifact(ref: str | Path, signature: Signature | None = None) -> Artifact:
    ref = str(ref)
    if ref.startswith(CORPUS_SCHEME):
        try:
            return get(ref[len(CORPUS_SCHEME):])
        except KeyError as exc:
            raise ArtifactError(str(exc.args[0])) from None
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactError(f"cannot read {ref}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{ref}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return parse_artifact(data, signature)


def dumps(artifact: Artifact) -> str:
    return canonical_json(artifact.to_json())


def store_artifact(artifact: Artifact, path: str | Path) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(artifact), encoding="utf-8")
