import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import formulas
from nmt import corpus
from nmt.analyzer import (
    Budget,
    RuleSet,
    analyze,
    check_rule_set,
    deterministic_refinements,
    inclusion_from_axiomatization,
    search_counterexample,
    search_theorem_bounded,
)
from nmt.constructions import enumerate_strict_homs, hom_flags, tilde, unconstrained
from nmt.deterministic import decide_matrix_equivalence
from nmt.formula import Signature, parse_formula, subformulas
from nmt.machines import build_reduction_pair, compile_machine, encode_trace, run
from nmt.semantics import SignatureMismatch, check_prevaluation, decide_consequence

FLAT = Signature({"flat": 1})


def P(s):
    return parse_formula(s, FLAT)


def test_rule_sets_on_own_matrices(C):
    for name in ["U", "M1", "M2", "M3", "M4", "M5", "M7", "M8"]:
        assert all(r.holds for r in check_rule_set(C[name], C[f"R_{name}"]))


def test_rule_check_examples(C):
    [rep] = check_rule_set(C["M7"], C["R_M8"])
    assert not rep.holds
    assert rep.result.witness.to_json() == [{"formula": "p1", "value": "1"}, {"formula": "flat(p1)", "value": "0"}]
    assert check_rule_set(C["M3"], RuleSet()) == []


def test_inclusion_from_axiomatization(C):
    assert inclusion_from_axiomatization(C["R_M2"], C["M5"])
    r = inclusion_from_axiomatization(C["R_M8"], C["M7"])
    assert not r and r.failing.rule.name == "r7"
    for name in ["U", "M1", "M6", "K"]:
        assert inclusion_from_axiomatization(C["R_U"], C[name])


def test_ruleset_json_roundtrip(C):
    rs = C["R_M7"]
    assert RuleSet.from_json(rs.to_json()) == rs
    with pytest.raises(ValueError):
        RuleSet.from_json({"rules": []})


def test_counterexample_examples(C):
    ce = search_counterexample(C["M7"], C["M8"], Budget(2, 1, 0))
    assert (ce.premises, ce.conclusion, ce.holds_in) == ((), P("flat(p1)"), 2)
    ce = search_counterexample(C["U"], C["M1"], Budget(2, 2, 2))
    assert (ce.premises, ce.conclusion, ce.holds_in) == ((P("p1"), P("flat(p1)")), P("p2"), 2)
    for name in ["U", "M6", "tilde_M3"]:
        assert search_counterexample(C[name], C[name], Budget(3, 2, 2)) is None


def test_counterexample_witness_rechecks(C):
    ce = search_counterexample(C["M2"], C["M3"], Budget())
    assert ce is not None
    fails = C["M2"] if ce.holds_in == 2 else C["M3"]
    w = ce.witness.witness
    assert check_prevaluation(fails, w) == []
    assert all(fails.is_designated(w[g]) for g in ce.premises)
    assert not fails.is_designated(w[ce.conclusion])


def test_theorem_search_examples(C):
    assert search_theorem_bounded(C["M8"], 2) == P("flat(p1)")
    assert search_theorem_bounded(C["U"], 4, 2) is None
    assert search_theorem_bounded(C["M6"], 4, 2) is None
    assert search_theorem_bounded(C["tilde_M8"], 3) == P("flat(p1)")
    assert search_theorem_bounded(compile_machine(C["LOOP"]), 6) is None


def test_theorem_search_on_tilded_machines(C):
    m = tilde(compile_machine(C["INC1"]))
    assert search_theorem_bounded(m, 3, 0) == encode_trace(run(C["INC1"]))
    loop = tilde(compile_machine(C["LOOP"]))
    assert search_theorem_bounded(loop, 6, 1) is None


def test_refinements_are_deterministic_and_inside(C):
    for name in ["M1", "M6", "K"]:
        m = C[name]
        for r in deterministic_refinements(m):
            assert r.deterministic
            assert {x: x for x in m.values} in [h.map for h in enumerate_strict_homs(r, m)]


def test_analyze_stages(C):
    v = analyze(C["M7"], C["M8"])
    assert (v.outcome, v.stage) == ("NotEquivalent", 1)
    v = analyze(C["tilde_M1"], C["U"])
    assert v.outcome == "Equivalent" and v.stage in (2, 3)
    v = analyze(C["tilde_M2"], C["U"])
    assert (v.outcome, v.stage) == ("Equivalent", 3)
    v = analyze(C["tilde_M7"], C["U"], tilde_of=C["M7"])
    assert (v.outcome, v.stage) == ("Equivalent", 4)
    v = analyze(C["tilde_M7"], C["U"])
    assert v.outcome == "Unknown"
    v = analyze(C["M6"], C["U"])
    assert (v.outcome, v.stage) == ("Unknown", 6)
    assert v.attempted == [
        "deterministic-decision",
        "strongly-preserving-hom",
        "strict-homs-both-ways",
        "tilde-no-theorems",
        "counterexample-search",
    ]
    assert v.to_json()["budget"] == {"depth": 3, "vars": 2, "premises": 2}


def test_tilde_m1_has_both_hom_certificates(C):
    # stage 2 fires first, but the stage 3 pair exists as well
    assert enumerate_strict_homs(C["U"], C["tilde_M1"])
    assert enumerate_strict_homs(C["tilde_M1"], C["U"])


def test_stage4_checks_the_tilde_claim(C):
    # a wrong preimage is ignored rather than trusted
    v = analyze(C["tilde_M7"], C["U"], tilde_of=C["M6"])
    assert v.outcome == "Unknown"
    v = analyze(C["tilde_M6"], C["U"], tilde_of=C["M6"], corpus=[("M7", C["M7"])])
    assert v.outcome == "Equivalent" and v.evidence["certificate"]["matrix"] == "M7"


def test_analyze_signature_mismatch(C):
    with pytest.raises(SignatureMismatch):
        analyze(C["M7"], C["I"])


@pytest.mark.parametrize("name", corpus.names("nmatrix"))
def test_analyze_self_is_equivalent(C, name):
    v = analyze(C[name], C[name])
    assert v.outcome == "Equivalent" and v.stage in (1, 2)


def test_evidence_rechecks(C):
    names = ["U", "M1", "M3", "M6", "M8", "tilde_M2", "tilde_M8"]
    for a in names:
        for b in names:
            v = analyze(C[a], C[b])
            ev = v.evidence
            if v.stage == 1:
                assert bool(decide_matrix_equivalence(C[a], C[b])) == ev["equivalent"]
            elif v.stage == 2:
                src, dst = (C[a], C[b]) if ev["from"] == 1 else (C[b], C[a])
                assert hom_flags(src, dst, ev["hom"]["map"]) == (True, True, True)
            elif v.stage == 3:
                assert hom_flags(C[a], C[b], ev["hom_1_to_2"]["map"])[0]
                assert hom_flags(C[b], C[a], ev["hom_2_to_1"]["map"])[0]
            elif v.stage == 5:
                gamma = [P(g) for g in ev["premises"]]
                concl = P(ev["conclusion"])
                holds, fails = (C[a], C[b]) if ev["holds_in"] == 1 else (C[b], C[a])
                assert decide_consequence(holds, gamma, concl)
                assert not decide_consequence(fails, gamma, concl)


def test_budget_monotonicity(C):
    pairs = [("U", "M6"), ("M1", "M3"), ("tilde_M1", "M6"), ("U", "M1")]
    for a, b in pairs:
        seen = set()
        for budget in [Budget(1, 1, 0), Budget(2, 1, 1), Budget(3, 2, 2)]:
            seen.add(analyze(C[a], C[b], budget).outcome)
        assert not {"Equivalent", "NotEquivalent"} <= seen


def test_reduction_pair_inc1(C):
    mt, u = build_reduction_pair(C["INC1"])
    v = analyze(mt, u, Budget(3, 0, 0))
    assert v.outcome == "NotEquivalent"
    assert v.evidence["premises"] == [] and v.evidence["holds_in"] == 1
    assert v.evidence["conclusion"] == encode_trace(run(C["INC1"])).text


def test_reduction_pair_loop_is_equivalent(C):
    # no halting state: every tilded value is designated and collapses onto U
    mt, u = build_reduction_pair(C["LOOP"])
    v = analyze(mt, u, Budget(3, 0, 0))
    assert (v.outcome, v.stage) == ("Equivalent", 2)


# -- the discrete logic of M6 -------------------------------------------------


def v_a(a, domain):
    return {b: ("0" if b == a else "1") for b in domain}


@given(formulas(FLAT, 3, 6), st.lists(formulas(FLAT, 3, 4), max_size=3))
@settings(max_examples=200, deadline=None)
def test_v_a_is_a_prevaluation_of_m6(a, others):
    m6 = corpus.get("M6")
    domain = set(subformulas(a))
    for b in others:
        domain |= set(subformulas(b))
    assert check_prevaluation(m6, v_a(a, domain)) == []


@pytest.mark.parametrize("budget", [Budget(2, 1, 1), Budget(3, 2, 2), Budget(4, 2, 1)])
def test_no_counterexample_between_u_and_m6(C, budget):
    assert search_counterexample(C["U"], C["M6"], budget) is None
    assert search_counterexample(unconstrained(FLAT), tilde(C["M6"]), budget) is None
