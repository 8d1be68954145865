"""Finite non-deterministic logical matrices: consequence, equivalence and reductions."""

from .formula import (
    App,
    Formula,
    Signature,
    Var,
    apply_substitution,
    formulas_up_to_depth,
    parse_formula,
    subformulas,
)
from .semantics import (
    NMatrix,
    PrevaluationTable,
    check_prevaluation,
    decide_consequence,
    express,
    is_theorem,
    validate_nmatrix,
)
from .constructions import certify_no_theorems, enumerate_strict_homs, tilde, unconstrained
from .deterministic import (
    build_theta,
    decide_matrix_equivalence,
    decide_matrix_inclusion,
    matrix_theorem_existence,
)
from .machines import CounterMachine, compile_machine, encode_trace, run

__all__ = [
    "App",
    "Formula",
    "Signature",
    "Var",
    "apply_substitution",
    "formulas_up_to_depth",
    "parse_formula",
    "subformulas",
    "NMatrix",
    "PrevaluationTable",
    "check_prevaluation",
    "decide_consequence",
    "express",
    "is_theorem",
    "validate_nmatrix",
    "certify_no_theorems",
    "enumerate_strict_homs",
    "tilde",
    "unconstrained",
    "build_theta",
    "decide_matrix_equivalence",
    "decide_matrix_inclusion",
    "matrix_theorem_existence",
    "CounterMachine",
    "compile_machine",
    "encode_trace",
    "run",
]
