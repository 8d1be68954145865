import itertools

import pytest
from hypothesis import given, settings

import oracles
from conftest import nmatrices
from nmt.corpus import duplicate_value_m7
from nmt.deterministic import (
    NotDeterministicError,
    ResourceLimitError,
    build_theta,
    decide_matrix_equivalence,
    decide_matrix_inclusion,
    function_closure,
    matrix_theorem_existence,
)
from nmt.formula import Signature, parse_formula
from nmt.semantics import SignatureMismatch, decide_consequence

FLAT = Signature({"flat": 1})
SIG2 = Signature([("f", 1), ("g", 2)])


def P(s):
    return parse_formula(s, FLAT)


def test_theta_m7_m8(C):
    th = build_theta(C["M7"], C["M8"], 2)
    assert [a.text for a in th] == ["p1", "p2", "flat(p1)", "flat(p2)", "flat(flat(p1))", "flat(flat(p2))"]


def test_theta_representatives_are_pairwise_distinct(C):
    th = build_theta(C["M4"], C["M5"], 2)
    keys = [th.tables[a] for a in th]
    assert len(set(keys)) == len(keys)
    f1, f2 = th.multifunctions(P("flat(p1)"))
    assert f1("1", "0") == {"0"} and f2("1", "0") == {"1"}


def test_closure_respects_depth_bound(C):
    reps, _ = function_closure([C["M7"]], 1, max_depth=1)
    assert [a.text for a in reps] == ["p1"]
    with pytest.raises(ResourceLimitError):
        function_closure([C["I"]], 3, cap=10)


def test_inclusion_examples(C):
    assert decide_matrix_inclusion(C["M7"], C["M7"])
    r = decide_matrix_inclusion(C["M7"], C["M8"])
    assert not r
    assert decide_consequence(C["M7"], r.premises, r.conclusion)
    assert not decide_consequence(C["M8"], r.premises, r.conclusion)
    r = decide_matrix_inclusion(C["M8"], C["M7"])
    assert not r and r.premises == () and r.conclusion == P("flat(p1)")


def test_equivalence_with_duplicated_value(C):
    assert decide_matrix_equivalence(C["M7"], duplicate_value_m7())
    assert decide_matrix_equivalence(C["M8"], C["tilde_M8"])


def test_requires_deterministic_and_same_signature(C):
    with pytest.raises(NotDeterministicError):
        decide_matrix_inclusion(C["M1"], C["M7"])
    with pytest.raises(SignatureMismatch):
        decide_matrix_inclusion(C["I"], C["M7"])


def test_theorem_existence(C):
    assert matrix_theorem_existence(C["M8"]) == P("flat(p1)")
    for name in ["M4", "M5", "M7"]:
        assert matrix_theorem_existence(C[name]) is None
    assert matrix_theorem_existence(C["I"]).text == "imp(p1,p1)"


@pytest.mark.parametrize("a, b", list(itertools.product(["M4", "M5", "M7", "M8"], repeat=2)) + [("I", "I")])
def test_inclusion_matches_theta_brute_force(C, a, b):
    th = build_theta(C[a], C[b], max(len(C[a].values), len(C[b].values)))
    assert len(th) <= 8
    assert bool(decide_matrix_inclusion(C[a], C[b])) == oracles.theta_inclusion(C[a], C[b], list(th))


@given(nmatrices(FLAT, 2, deterministic=True), nmatrices(FLAT, 2, deterministic=True))
@settings(max_examples=60, deadline=None)
def test_inclusion_brute_force_random_flat(m1, m2):
    th = build_theta(m1, m2, 2)
    assert bool(decide_matrix_inclusion(m1, m2)) == oracles.theta_inclusion(m1, m2, list(th))


@given(nmatrices(SIG2, 2, deterministic=True), nmatrices(SIG2, 2, deterministic=True))
@settings(max_examples=25, deadline=None)
def test_inclusion_witness_is_sound(m1, m2):
    r = decide_matrix_inclusion(m1, m2)
    if not r:
        assert oracles.consequence(m1, r.premises, r.conclusion)
        assert not oracles.consequence(m2, r.premises, r.conclusion)
