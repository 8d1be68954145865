import pytest
from hypothesis import given, settings

from conftest import formulas
from nmt.formula import (
    App,
    ArityError,
    FormulaSyntaxError,
    Signature,
    SignatureError,
    UnknownConnectiveError,
    Var,
    apply_substitution,
    compose,
    count_formulas_up_to_depth,
    formulas_up_to_depth,
    is_closed,
    iter_formulas,
    parse_formula,
    subformulas,
    variables,
)

FLAT = Signature({"flat": 1})
K = Signature([("neg", 1), ("box", 1), ("or", 2), ("imp", 2)])
CM = Signature([("zero", 0), ("eps", 0), ("succ", 1), ("step_q0", 2)])


def P(s, sig=FLAT):
    return parse_formula(s, sig)


def test_parse_and_print_roundtrip_examples():
    for s in ["p1", "flat(p1)", "flat(flat(p12))"]:
        assert P(s).text == s
    assert parse_formula("step_q0(eps, zero)", CM).text == "step_q0(eps,zero)"
    assert parse_formula("imp(box(or(p1,neg(p1))),p2)", K).depth == 5


def test_depth_and_size():
    a = P("flat(flat(p1))")
    assert (a.depth, a.size) == (3, 3)
    z = parse_formula("zero", CM)
    assert z.depth == 1 and is_closed(z)


@pytest.mark.parametrize(
    "text, err, code",
    [
        ("flat(", FormulaSyntaxError, "syntax-error"),
        ("flat(p1", FormulaSyntaxError, "syntax-error"),
        ("flat(p1))", FormulaSyntaxError, "syntax-error"),
        ("p1 p2", FormulaSyntaxError, "syntax-error"),
        ("fl@t(p1)", FormulaSyntaxError, "syntax-error"),
        ("", FormulaSyntaxError, "syntax-error"),
        ("neg(p1)", UnknownConnectiveError, "unknown-connective"),
        ("flat(p1,p2)", ArityError, "arity-mismatch"),
        ("flat", ArityError, "arity-mismatch"),
    ],
)
def test_parse_errors_have_distinct_codes(text, err, code):
    with pytest.raises(err) as info:
        P(text)
    assert info.value.code == code


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as info:
        P("flat(p1))")
    assert info.value.position == 8


def test_signature_validation():
    with pytest.raises(SignatureError):
        Signature({"p1": 1})
    with pytest.raises(SignatureError):
        Signature([("a", 1), ("a", 2)])
    with pytest.raises(SignatureError):
        Signature({"a": -1})
    s = Signature.from_json(K.to_json())
    assert s == K


def test_subformulas_canonical_order():
    a = P("flat(flat(p1))")
    assert [b.text for b in subformulas(a)] == ["p1", "flat(p1)", "flat(flat(p1))"]


def test_canonical_order_is_depth_then_size_then_text():
    a, b = parse_formula("or(p1,p2)", K), parse_formula("neg(neg(p1))", K)
    assert a < b  # depth 2 before depth 3
    c, d = parse_formula("or(neg(p1),p1)", K), parse_formula("neg(neg(p1))", K)
    assert d < c  # same depth, fewer nodes first


def test_substitution_and_composition():
    a = P("flat(p1)")
    s = {1: P("flat(p2)")}
    t = {2: P("p1")}
    assert apply_substitution(s, a).text == "flat(flat(p2))"
    assert apply_substitution(compose(t, s), a) == apply_substitution(t, apply_substitution(s, a))
    assert apply_substitution({}, a) is not None and apply_substitution({}, a) == a


def test_enumeration_matches_count():
    for sig, nv, d in [(FLAT, 2, 4), (K, 1, 3), (CM, 0, 4), (CM, 1, 3)]:
        fs = formulas_up_to_depth(sig, nv, d)
        assert len(fs) == len(set(fs)) == count_formulas_up_to_depth(sig, nv, d)
        assert fs == sorted(fs, key=lambda a: a.key())
        assert all(a.depth <= d and variables(a) <= set(range(1, nv + 1)) for a in fs)


def test_iter_formulas_is_lazy_prefix():
    it = iter_formulas(CM, 0, 10)
    first = [next(it) for _ in range(3)]
    assert [a.text for a in first] == ["eps", "zero", "succ(eps)"]


@given(formulas(K, 3, 4))
def test_print_parse_roundtrip(a):
    assert parse_formula(a.text, K) == a


@given(formulas(K, 2, 3), formulas(K, 2, 2), formulas(K, 2, 2), formulas(K, 2, 2))
@settings(max_examples=60)
def test_substitution_composition_law(a, b1, b2, c1):
    s = {1: b1, 2: b2}
    t = {1: c1}
    assert apply_substitution(compose(t, s), a) == apply_substitution(t, apply_substitution(s, a))


@given(formulas(K, 2, 4))
def test_subformulas_closed_and_sorted(a):
    subs = subformulas(a)
    assert subs[-1] == a
    ss = set(subs)
    for b in subs:
        if isinstance(b, App):
            assert set(b.args) <= ss
    assert all(x.key() < y.key() for x, y in zip(subs, subs[1:]))


def test_var_rejects_bad_index():
    with pytest.raises(ValueError):
        Var(0)
