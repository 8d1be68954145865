import json

import pytest

from nmt import corpus
from nmt.analyzer import Budget, analyze, search_theorem_bounded
from nmt.cli import main
from nmt.constructions import enumerate_strict_homs, tilde
from nmt.deterministic import decide_matrix_equivalence
from nmt.io import ArtifactError, dumps, load_artifact, parse_artifact, store_artifact
from nmt.machines import MachineError, compile_machine, run
from nmt.semantics import NMatrixError, decide_consequence
from nmt.formula import parse_formula


def nmt(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def nmt_json(capsys, *argv):
    code, out, _ = nmt(capsys, *argv, "--json")
    return code, json.loads(out)


# -- corpus -------------------------------------------------------------------


def test_corpus_tables(C):
    m3 = C["M3"]
    assert m3.apply("flat", "0") == {"0"} and m3.apply("flat", "1") == {"0", "1"}
    assert C["K"].apply("or", "f", "t") == {"t", "T"}
    t5 = C["tilde_M5"]
    assert t5.apply("flat", "1") == {"1"}
    assert t5.apply("flat", "0") == t5.apply("flat", "0~") == {"0", "0~"}


def test_corpus_contents():
    assert len(corpus.names("nmatrix")) == 21
    assert corpus.names("machine") == ["INC1", "LOOP", "INCTEST"]
    assert set(corpus.names("rules")) == {f"R_{n}" for n in ["U", "M1", "M2", "M3", "M4", "M5", "M7", "M8"]}
    for n in corpus.names("nmatrix"):
        if n.startswith("tilde_"):
            assert corpus.get(n) == tilde(corpus.get(n[len("tilde_"):]))
    with pytest.raises(KeyError):
        corpus.get("M9")


def test_corpus_checksums_detect_tampering(monkeypatch):
    corpus.load_corpus.cache_clear()
    monkeypatch.setitem(corpus.FLAT_TABLES, "M3", ("0", "1"))
    with pytest.raises(corpus.CorpusIntegrityError):
        corpus.load_corpus()
    monkeypatch.undo()
    corpus.load_corpus.cache_clear()
    assert corpus.load_corpus()


@pytest.mark.parametrize("name", corpus.names())
def test_store_load_roundtrip(tmp_path, name):
    a = corpus.get(name)
    p = tmp_path / f"{name}.json"
    store_artifact(a, p)
    b = load_artifact(p)
    assert b == a
    assert p.read_text() == dumps(b)


def test_export_then_load(tmp_path, capsys):
    code, _, _ = nmt(capsys, "corpus", "export", "-o", str(tmp_path))
    assert code == 0
    for name in corpus.names():
        assert load_artifact(tmp_path / f"{name}.json") == corpus.get(name)


# -- validation ---------------------------------------------------------------


def nmatrix_json():
    return json.loads(dumps(corpus.get("M1")))


def test_bad_designated_value(tmp_path, capsys):
    d = nmatrix_json()
    d["designated"] = ["2"]
    with pytest.raises(NMatrixError):
        parse_artifact(d)
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    code, payload = nmt_json(capsys, "tilde", str(p))
    assert code == 3 and payload["error"] == "NMatrixError" and payload["violations"]


def test_machine_initial_not_in_states():
    d = json.loads(dumps(corpus.get("INC1")))
    d["initial"] = "q7"
    with pytest.raises(MachineError):
        parse_artifact(d)


def test_parse_error_has_location(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "values": [\n}')
    with pytest.raises(ArtifactError, match=r"broken\.json:3:1"):
        load_artifact(p)


def test_unknown_shape_and_missing_file(tmp_path):
    with pytest.raises(ArtifactError):
        parse_artifact({"foo": 1})
    with pytest.raises(ArtifactError):
        load_artifact(tmp_path / "nope.json")
    with pytest.raises(ArtifactError):
        load_artifact("corpus:nope")


# -- commands -----------------------------------------------------------------


def test_check_examples(capsys):
    assert nmt(capsys, "check", "corpus:M1", "--premises", "p1;flat(p1)", "--conclusion", "p2")[0] == 0
    code, payload = nmt_json(capsys, "check", "corpus:U", "--premises", "p1", "--conclusion", "p2")
    assert code == 1 and payload["holds"] is False


def test_analyze_examples(capsys):
    code, payload = nmt_json(capsys, "analyze", "corpus:M7", "corpus:M8")
    assert code == 1 and payload["stage"] == 1 and payload["evidence"]["premises"] == ["flat(flat(p1))"]
    code, payload = nmt_json(capsys, "analyze", "corpus:M6", "corpus:U")
    assert code == 2 and payload["outcome"] == "Unknown"
    code, payload = nmt_json(capsys, "analyze", "corpus:tilde_M7", "corpus:U", "--tilde-of", "corpus:M7")
    assert code == 0 and payload["stage"] == 4


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 3
    with pytest.raises(SystemExit) as e:
        main(["check", "corpus:M1"])
    assert e.value.code == 3
    code, payload = nmt_json(capsys, "check", "corpus:M1", "--conclusion", "flat(")
    assert code == 3 and payload["code"] == "syntax-error"
    code, payload = nmt_json(capsys, "check", "corpus:M1", "--conclusion", "neg(p1)")
    assert code == 3 and payload["code"] == "unknown-connective"
    code, payload = nmt_json(capsys, "eqv-matrix", "corpus:M1", "corpus:M7")
    assert code == 3 and payload["error"] == "NotDeterministicError"
    code, payload = nmt_json(capsys, "analyze", "corpus:M7", "corpus:I")
    assert code == 3 and payload["error"] == "SignatureMismatch"
    code, _ = nmt_json(capsys, "run-cm", "corpus:M1")
    assert code == 3


def test_cli_matches_library(capsys):
    C = {n: corpus.get(n) for n in corpus.names()}
    code, payload = nmt_json(capsys, "hom", "corpus:U", "corpus:tilde_M1")
    assert payload["homs"] == [h.to_json() for h in enumerate_strict_homs(C["U"], C["tilde_M1"])]
    code, payload = nmt_json(capsys, "eqv-matrix", "corpus:M7", "corpus:M8")
    assert payload == decide_matrix_equivalence(C["M7"], C["M8"]).to_json()
    code, payload = nmt_json(capsys, "thm-exists", "corpus:M8")
    assert code == 0 and payload["theorem"] == "flat(p1)"
    assert nmt_json(capsys, "thm-exists", "corpus:M7")[0] == 1
    code, payload = nmt_json(capsys, "run-cm", "corpus:INCTEST")
    assert code == 0 and payload == run(C["INCTEST"]).to_json()
    assert nmt_json(capsys, "run-cm", "corpus:LOOP", "--max-steps", "20")[0] == 1
    code, payload = nmt_json(capsys, "thmsearch", "corpus:M8", "--depth", "2")
    assert payload["theorem"] == search_theorem_bounded(C["M8"], 2).text
    code, payload = nmt_json(capsys, "check", "corpus:K", "--premises", "box(p1)", "--conclusion", "p1")
    sig = C["K"].signature
    assert payload == decide_consequence(C["K"], [parse_formula("box(p1)", sig)], parse_formula("p1", sig)).to_json()
    code, payload = nmt_json(capsys, "analyze", "corpus:U", "corpus:M1", "--depth", "2", "--no-corpus")
    assert payload == analyze(C["U"], C["M1"], Budget(2, 2, 2)).to_json()


def test_rules_check(capsys):
    assert nmt(capsys, "rules-check", "corpus:M7", "corpus:R_M7")[0] == 0
    code, payload = nmt_json(capsys, "rules-check", "corpus:M7", "corpus:R_M8")
    assert code == 1 and payload["rules"][0]["holds"] is False


def test_express_output(capsys):
    code, payload = nmt_json(capsys, "express", "corpus:K", "imp(p1,p2)", "--arity", "2")
    assert code == 0 and len(payload["table"]) == 16
    code, out, _ = nmt(capsys, "express", "corpus:M7", "flat(flat(p1))", "--arity", "1")
    assert out.splitlines() == ["0 -> {0}", "1 -> {1}"]


def test_file_outputs(tmp_path, capsys):
    assert nmt(capsys, "tilde", "corpus:M7", "-o", str(tmp_path / "t.json"))[0] == 0
    assert load_artifact(tmp_path / "t.json") == corpus.get("tilde_M7")
    assert nmt(capsys, "unconstrained", "corpus:K", "-o", str(tmp_path / "u.json"))[0] == 0
    u = load_artifact(tmp_path / "u.json")
    assert u.signature == corpus.get("K").signature and u.values == ("0", "1")
    assert nmt(capsys, "compile-cm", "corpus:INC1", "-o", str(tmp_path / "c.json"))[0] == 0
    assert load_artifact(tmp_path / "c.json") == compile_machine(corpus.get("INC1"))
    assert nmt(capsys, "reduce", "corpus:INC1", "-o", str(tmp_path / "pair"))[0] == 0
    assert load_artifact(tmp_path / "pair" / "tilde.json") == tilde(compile_machine(corpus.get("INC1")))


def test_corpus_list(capsys):
    code, payload = nmt_json(capsys, "corpus", "list")
    assert code == 0 and [e["name"] for e in payload["entries"]] == corpus.names()
    code, out, _ = nmt(capsys, "corpus", "export", "M1")
    assert json.loads(out) == corpus.get("M1").to_json()


def test_outputs_are_deterministic(capsys):
    a = nmt(capsys, "analyze", "corpus:U", "corpus:M3", "--json")
    b = nmt(capsys, "analyze", "corpus:U", "corpus:M3", "--json")
    assert a == b
