import json
from pathlib import Path

import pytest
from hypothesis import given

from gen import random_dbca, random_dca, random_dfa, random_dpda, random_transducer, rngs
from pdsync.automata import Kind
from pdsync.dfasync import cerny, shortest_sync_word
from pdsync.fileformat import (
    ParseError,
    canonical,
    check_word,
    load_machine,
    load_witness,
    machine_to_dict,
    parse_machine,
    parse_word,
    render_word,
    serialize_machine,
    validate_witness,
    verify_witness,
    witness_record,
)

DATA = Path(__file__).parent / "data"
GOLDEN = sorted(DATA.glob("*.json"))


@pytest.mark.parametrize("path", GOLDEN, ids=lambda p: p.stem)
def test_golden_files_are_canonical(path):
    text = path.read_text()
    assert canonical(text) == text


def test_golden_kinds():
    kinds = {p.stem: load_machine(p) for p in GOLDEN}
    assert kinds["cerny4"].kind is Kind.DFA
    assert kinds["cerny3_dpbca"].kind is Kind.DPBCA
    assert kinds["sink_dpda"].declared is Kind.DPDA and kinds["sink_dpda"].kind is Kind.DPBCA
    assert kinds["sink_dpda"].provenance["construction"] == "hand-written"
    assert kinds["climb_dbca"].kind is Kind.DBCA
    assert kinds["reset_transducer"].kind is Kind.TRANSDUCER
    assert kinds["partial"].kind is Kind.PARTIAL_DFA


@given(rngs)
def test_round_trip_random_machines(rng):
    for m in (random_dfa(rng), random_dpda(rng), random_dca(rng), random_dbca(rng), random_transducer(rng)):
        text = serialize_machine(m)
        back = parse_machine(text).machine
        assert back.transitions == m.transitions
        assert back.states == m.states
        assert serialize_machine(back) == text


def _doc(path="cerny4.json"):
    return json.loads((DATA / path).read_text())


def _diagnostics(text):
    with pytest.raises(ParseError) as exc:
        parse_machine(text, "m.json")
    return exc.value


def test_json_syntax_error_has_position():
    err = _diagnostics('{\n  "format": "pdsync-machine/1",\n  "kind": }\n')
    d = err.diagnostics[0]
    assert d.line == 3 and d.column is not None
    assert str(err).startswith("m.json:3:")


def test_invalid_utf8():
    err = _diagnostics(b'{"kind": "\xff"}')
    assert "UTF-8" in err.diagnostics[0].message


def test_schema_error_points_at_transition_line():
    text = (DATA / "cerny4.json").read_text()
    text = text.replace('{"from": "1", "input": "a", "to": "2"}', '{"from": "1", "input": "a"}')
    err = _diagnostics(text)
    d = err.diagnostics[0]
    assert d.path.startswith("transitions[")
    assert "'to' is a required property" in d.message
    assert text.splitlines()[d.line - 1].strip().startswith('{"from": "1", "input": "a"}')


def test_undeclared_state_is_located():
    doc = _doc()
    doc["transitions"][5]["to"] = "9"
    text = json.dumps(doc, indent=1)
    err = _diagnostics(text)
    assert any("undeclared" in d.message and d.path == "transitions[5]" for d in err.diagnostics)


def test_duplicate_transition():
    doc = _doc()
    doc["transitions"].append(dict(doc["transitions"][0]))
    err = _diagnostics(json.dumps(doc))
    assert "duplicate transition for (0, a)" in str(err)


def test_blindness_violation_cites_transition():
    text = (DATA / "cerny3_dpbca.json").read_text()
    line = '{"from": "0", "input": "a", "top": "1", "to": "1", "push": ["1"]}'
    assert line in text
    text = text.replace(line, line.replace('["1"]', "[]"))
    err = _diagnostics(text)
    hits = [d for d in err.diagnostics if "blindness violated" in d.message]
    assert hits and "(0, a)" in hits[0].message
    # the pair (0, a) spans records 0 and 1; the first one is cited
    assert hits[0].path == "transitions[0]"
    assert '"from": "0", "input": "a"' in text.splitlines()[hits[0].line - 1]


def test_declared_kind_too_strong():
    doc = _doc("partial.json")
    doc["kind"] = "dfa"
    err = _diagnostics(json.dumps(doc))
    assert any("undefined" in d.message for d in err.diagnostics)


def test_kind_specific_fields_required():
    doc = _doc("sink_dpda.json")
    del doc["stack_alphabet"]
    err = _diagnostics(json.dumps(doc))
    assert any("stack_alphabet" in d.message for d in err.diagnostics)


def test_words():
    assert render_word(()) == "ε"
    assert parse_word("ε") == () and parse_word(" a  b ") == ("a", "b")
    assert parse_word(render_word(("x", "y"))) == ("x", "y")


def test_check_word_across_kinds():
    kinds = {p.stem: load_machine(p).machine for p in GOLDEN}
    assert check_word(kinds["cerny4"], "b a a a b a a a b")[0]
    ok, reason = check_word(kinds["cerny4"], "a")
    assert not ok and "4 states" in reason
    assert check_word(kinds["sink_dpda"], "b a", "same")[0]
    assert not check_word(kinds["sink_dpda"], "b a", "empty")[0]
    assert check_word(kinds["climb_dbca"], "a", "same")[0]
    assert not check_word(kinds["climb_dbca"], "a", "empty")[0]
    assert check_word(kinds["reset_transducer"], "r")[0]
    assert check_word(kinds["partial"], "a b")[0]
    assert check_word(kinds["partial"], "b") == (False, "the word uses an undefined transition")


def test_turn_bound_reason():
    m = load_machine(DATA / "sink_dpda.json").machine
    ok, reason = check_word(m, "b a", "arbitrary", turns=0)
    assert ok
    assert machine_to_dict(m)["kind"] == "dpda"


def test_witness_round_trip(tmp_path):
    c = cerny(4)
    w = shortest_sync_word(c)
    rec = witness_record(c, "YES", w, stats={"subsets": 10})
    validate_witness(rec)
    assert rec["verified"] and len(rec["runs"]) == 4
    path = tmp_path / "w.json"
    path.write_text(json.dumps(rec))
    back = load_witness(path)
    assert verify_witness(c, back)
    back["runs"][0]["state"] = "3"
    assert not verify_witness(c, back)


def test_witness_schema_rejects_garbage(tmp_path):
    with pytest.raises(ParseError):
        validate_witness({"format": "pdsync-witness/1", "verdict": "MAYBE"})
    path = tmp_path / "bad.json"
    path.write_text("{")
    with pytest.raises(ParseError):
        load_witness(path)


def test_witness_for_stack_machine_records_turns():
    m = load_machine(DATA / "sink_dpda.json").machine
    rec = witness_record(m, "FOUND", ("b", "a"), model="same", turn_bound=0)
    validate_witness(rec)
    assert [r["turns"] for r in rec["runs"]] == [0, 0]
    assert rec["runs"][0]["stack"] == ["bot", "X"]
