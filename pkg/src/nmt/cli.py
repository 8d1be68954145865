"""Command-line entry point ``nmt``.

Exit codes: 0 for a positive answer, 1 for a negative one, 2 for Unknown
(analyze only) and 3 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus
from .analyzer import Budget, RuleSet, analyze, check_rule_set, search_theorem_bounded
from .constructions import enumerate_strict_homs, tilde, unconstrained
from .corpus import canonical_json
from .deterministic import (
    NotDeterministicError,
    ResourceLimitError,
    decide_matrix_equivalence,
    matrix_theorem_existence,
)
from .formula import FormulaError, SignatureError, parse_formula
from .io import ArtifactError, dumps, load_artifact, store_artifact
from .machines import CounterMachine, MachineError, build_reduction_pair, compile_machine, run
from .semantics import NMatrix, NMatrixError, SignatureMismatch, decide_consequence, express

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _load(ref: str, kind: type, what: str, signature=None):
    a = load_artifact(ref, signature)
    if not isinstance(a, kind):
        raise UsageError(f"{ref} is not {what}")
    return a


def _matrix(ref: str) -> NMatrix:
    return _load(ref, NMatrix, "an Nmatrix")


def _machine(ref: str) -> CounterMachine:
    return _load(ref, CounterMachine, "a counter machine")


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json or text is None:
        sys.stdout.write(canonical_json(payload))
    else:
        print(text)


def _write_or_print(artifact, out: str | None) -> None:
    if out:
        store_artifact(artifact, out)
    else:
        sys.stdout.write(dumps(artifact))


# --------------------------------------------------------------------------
# commands


def cmd_tilde(args) -> int:
    _write_or_print(tilde(_matrix(args.matrix)), args.output)
    return EXIT_YES


def cmd_unconstrained(args) -> int:
    _write_or_print(unconstrained(_matrix(args.matrix).signature), args.output)
    return EXIT_YES


def cmd_hom(args) -> int:
    homs = enumerate_strict_homs(_matrix(args.source), _matrix(args.target), strong_only=args.strong_only)
    lines = [json.dumps(h.to_json()["map"]) + (" strongly-preserving" if h.strongly_preserving else "") for h in homs]
    _emit(args, {"homs": [h.to_json() for h in homs]}, "\n".join(lines) or "no strict homomorphism")
    return EXIT_YES if homs else EXIT_NO


def cmd_eqv_matrix(args) -> int:
    r = decide_matrix_equivalence(_matrix(args.m1), _matrix(args.m2))
    if r:
        text = "equivalent"
    else:
        prem = ", ".join(a.text for a in r.premises)
        text = f"not equivalent: {{{prem}}} |- {r.conclusion.text} holds only in matrix {r.holds_in}"
    _emit(args, r.to_json(), text)
    return EXIT_YES if r else EXIT_NO


def cmd_thm_exists(args) -> int:
    a = matrix_theorem_existence(_matrix(args.matrix))
    _emit(args, {"theorem": a.text if a else None}, f"theorem: {a.text}" if a else "no theorems")
    return EXIT_YES if a else EXIT_NO


def cmd_run_cm(args) -> int:
    t = run(_machine(args.machine), max_steps=args.max_steps)
    text = " -> ".join(str(c) for c in t.configurations)
    text += "\nhalted" if t.halted else f"\nnot halted after {args.max_steps} steps"
    _emit(args, t.to_json(), text)
    return EXIT_YES if t.halted else EXIT_NO


def cmd_compile_cm(args) -> int:
    _write_or_print(compile_machine(_machine(args.machine)), args.output)
    return EXIT_YES


def cmd_reduce(args) -> int:
    mt, u = build_reduction_pair(_machine(args.machine))
    out = Path(args.output)
    store_artifact(mt, out / "tilde.json")
    store_artifact(u, out / "unconstrained.json")
    _emit(args, {"tilde": str(out / "tilde.json"), "unconstrained": str(out / "unconstrained.json")},
          f"wrote {out / 'tilde.json'} and {out / 'unconstrained.json'}")
    return EXIT_YES


def cmd_analyze(args) -> int:
    m1, m2 = _matrix(args.m1), _matrix(args.m2)
    bases = [_matrix(t) for t in args.tilde_of or []]
    pool = [] if args.no_corpus else [
        (n, corpus.get(n)) for n in corpus.names("nmatrix") if corpus.get(n).deterministic
    ]
    budget = Budget(args.depth, args.vars, args.premises)
    v = analyze(m1, m2, budget, tilde_of=bases or None, corpus=pool)
    sys.stdout.write(canonical_json(v.to_json()))
    return {"Equivalent": EXIT_YES, "NotEquivalent": EXIT_NO}.get(v.outcome, EXIT_UNKNOWN)


def cmd_rules_check(args) -> int:
    m = _matrix(args.matrix)
    rules = _load(args.rules, RuleSet, "a rule set", m.signature)
    reports = check_rule_set(m, rules)
    lines = [f"{'holds' if r.holds else 'FAILS'}  {r.rule.name or ''} {r.rule}".replace("  ", " ", 1) for r in reports]
    _emit(args, {"rules": [r.to_json() for r in reports]}, "\n".join(lines) or "no rules")
    return EXIT_YES if all(r.holds for r in reports) else EXIT_NO


def cmd_corpus(args) -> int:
    if args.action == "list":
        entries = corpus.load_corpus()
        _emit(
            args,
            {"entries": [{"name": e.name, "kind": e.kind, "provenance": e.provenance} for e in entries]},
            "\n".join(f"{e.name:10} {e.kind:8} {e.provenance}" for e in entries),
        )
        return EXIT_YES
    targets = args.names or corpus.names()
    if not args.output:
        if len(targets) != 1:
            raise UsageError("export of several entries needs -o DIR")
        sys.stdout.write(dumps(corpus.get(targets[0])))
        return EXIT_YES
    for n in targets:
        try:
            store_artifact(corpus.get(n), Path(args.output) / f"{n}.json")
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    return EXIT_YES


def cmd_check(args) -> int:
    m = _matrix(args.matrix)
    prem = [s for s in (args.premises or "").split(";") if s.strip()]
    gamma = [parse_formula(s, m.signature) for s in prem]
    a = parse_formula(args.conclusion, m.signature)
    r = decide_consequence(m, gamma, a)
    if r:
        text = "holds"
    else:
        text = "fails; countermodel:\n" + "\n".join(f"  {b.text} = {x}" for b, x in r.witness.items())
    _emit(args, r.to_json(), text)
    return EXIT_YES if r else EXIT_NO


def cmd_express(args) -> int:
    m = _matrix(args.matrix)
    t = express(m, parse_formula(args.formula, m.signature), args.arity)
    rows = t.to_json()
    text = "\n".join(
        f"{', '.join(r['args']) or '()'} -> {{{', '.join(r['out'])}}}" for r in rows["table"]
    )
    _emit(args, rows, text)
    return EXIT_YES


def cmd_thmsearch(args) -> int:
    m = _matrix(args.matrix)
    a = search_theorem_bounded(m, args.depth, args.vars)
    payload = {"theorem": a.text if a else None, "depth": args.depth, "vars": args.vars}
    _emit(args, payload, f"theorem: {a.text}" if a else f"no theorem up to depth {args.depth}")
    return EXIT_YES if a else EXIT_NO


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="JSON output")
    p = _Parser(prog="nmt", description="Finite Nmatrices: consequence, equivalence, reductions.",
                parents=[common])
    p.set_defaults(json=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("tilde", cmd_tilde, "tilded Nmatrix")
    sp.add_argument("matrix")
    sp.add_argument("-o", "--output")
    sp = add("unconstrained", cmd_unconstrained, "unconstrained Nmatrix over a matrix's signature")
    sp.add_argument("matrix")
    sp.add_argument("-o", "--output")
    sp = add("hom", cmd_hom, "strict homomorphisms")
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("--strong-only", action="store_true")
    sp = add("eqv-matrix", cmd_eqv_matrix, "decide equivalence of deterministic matrices")
    sp.add_argument("m1")
    sp.add_argument("m2")
    sp = add("thm-exists", cmd_thm_exists, "decide theorem existence for a deterministic matrix")
    sp.add_argument("matrix")
    sp = add("run-cm", cmd_run_cm, "simulate a counter machine from zero counters")
    sp.add_argument("machine")
    sp.add_argument("--max-steps", type=int, default=10_000)
    sp = add("compile-cm", cmd_compile_cm, "compile a counter machine into an Nmatrix")
    sp.add_argument("machine")
    sp.add_argument("-o", "--output")
    sp = add("reduce", cmd_reduce, "write the (tilde, unconstrained) pair for a machine")
    sp.add_argument("machine")
    sp.add_argument("-o", "--output", required=True)
    sp = add("analyze", cmd_analyze, "best-effort equivalence analysis")
    sp.add_argument("m1")
    sp.add_argument("m2")
    sp.add_argument("--depth", type=int, default=Budget.depth)
    sp.add_argument("--vars", type=int, default=Budget.vars)
    sp.add_argument("--premises", type=int, default=Budget.premises)
    sp.add_argument("--tilde-of", action="append", metavar="M", help="claimed tilde preimage (repeatable)")
    sp.add_argument("--no-corpus", action="store_true", help="do not use bundled matrices as certificates")
    sp = add("rules-check", cmd_rules_check, "check each rule of a rule set")
    sp.add_argument("matrix")
    sp.add_argument("rules")
    sp = add("corpus", cmd_corpus, "list or export bundled artifacts")
    sp.add_argument("action", choices=["list", "export"])
    sp.add_argument("names", nargs="*")
    sp.add_argument("-o", "--output")
    sp = add("check", cmd_check, "decide a consequence")
    sp.add_argument("matrix")
    sp.add_argument("--premises", default="", help="';'-separated formulas")
    sp.add_argument("--conclusion", required=True)
    sp = add("express", cmd_express, "multi-function expressed by a formula")
    sp.add_argument("matrix")
    sp.add_argument("formula")
    sp.add_argument("--arity", type=int, required=True)
    sp = add("thmsearch", cmd_thmsearch, "bounded theorem search")
    sp.add_argument("matrix")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--vars", type=int, default=1)
    return p


INPUT_ERRORS = (
    UsageError,
    ArtifactError,
    FormulaError,
    SignatureError,
    SignatureMismatch,
    NMatrixError,
    MachineError,
    NotDeterministicError,
    ResourceLimitError,
    ValueError,
)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        payload: dict = {"error": type(exc).__name__, "message": str(exc)}
        code = getattr(exc, "code", None)
        if isinstance(code, str):
            payload["code"] = code
        if isinstance(exc, NMatrixError):
            payload["violations"] = [v.to_json() for v in exc.violations]
        if args.json:
            sys.stdout.write(canonical_json(payload))
        print(f"nmt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
