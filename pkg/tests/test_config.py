import json

import pytest

from factalg.config import Config, load_config, paper_examples, paper_examples_text, parse_config, parse_rational
from factalg.errors import RationalParseError, SchemaError
from fractions import Fraction

MINIMAL = {
    "format": "factalg-config", "version": 1,
    "spaces": {"R": {"kind": "line"}},
    "universes": {"U": {"space": "R", "opens": ["(0,1)", "(1,2)", "(0,2)"]}},
    "algebras": {"A": {"kind": "matrix", "n": 2}},
    "models": {"F": {"kind": "interval", "algebra": "A", "universe": "U"}},
    "tasks": [{"id": "mult", "command": "check-algebra", "check": "multiplicativity", "params": {"model": "F"}}],
}


def doc(**changes):
    d = json.loads(json.dumps(MINIMAL))
    d.update(changes)
    return json.dumps(d)


def test_minimal_config_parses():
    cfg = parse_config(json.dumps(MINIMAL))
    assert isinstance(cfg, Config)
    assert [t.id for t in cfg.tasks] == ["mult"]
    f = cfg.model("F")
    assert f.value(f.space.open("(0,2)")).dim == 4
    assert cfg.model("F") is f             # cached


def test_rationals():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(-4) == -4
    with pytest.raises(RationalParseError):
        parse_rational("1/0")
    with pytest.raises(RationalParseError):
        parse_rational(0.5)
    with pytest.raises(RationalParseError):
        parse_rational(True)


def test_zero_denominator_in_document():
    with pytest.raises(RationalParseError) as e:
        parse_config(doc(spaces={"R": {"kind": "line", "marks": ["1/0"]}}))
    assert "$.spaces.R.marks[0]" in str(e.value)


def test_zero_denominator_inside_open_literal():
    with pytest.raises((RationalParseError, SchemaError)):
        parse_config(doc(universes={"U": {"space": "R", "opens": ["(0,1/0)"]}}))


def test_malformed_rational_slot():
    with pytest.raises(RationalParseError):
        parse_config(doc(spaces={"R": {"kind": "line", "marks": ["one"]}}))


@pytest.mark.parametrize("bad,where", [
    ({"format": "other"}, "$.format"),
    ({"version": 2}, "$.version"),
    ({"tasks": [{"id": "x", "command": "fly", "check": "c"}]}, "$.tasks[0].command"),
    ({"extra": 1}, "$"),
])
def test_schema_errors_have_locations(bad, where):
    with pytest.raises(SchemaError) as e:
        parse_config(doc(**bad))
    assert str(e.value).startswith(where)


def test_unknown_check_and_duplicate_ids():
    with pytest.raises(SchemaError):
        parse_config(doc(tasks=[{"id": "x", "command": "evaluate", "check": "nothing"}]))
    t = MINIMAL["tasks"][0]
    with pytest.raises(SchemaError):
        parse_config(doc(tasks=[t, t]))


def test_bad_reference_is_config_error():
    with pytest.raises(SchemaError):
        parse_config(doc(universes={"U": {"space": "Nowhere", "opens": []}}))
    with pytest.raises(SchemaError):
        parse_config(doc(universes={"U": {"space": "R", "opens": ["(0,2)+(1,3)"]}}))


def test_invalid_json_and_missing_file(tmp_path):
    with pytest.raises(SchemaError):
        parse_config("{not json")
    with pytest.raises(SchemaError):
        load_config(str(tmp_path / "absent.json"))


def test_fixture_round_trip(tmp_path):
    text = paper_examples_text()
    p = tmp_path / "copy.json"
    p.write_text(text)
    a, b = paper_examples(), load_config(str(p))
    assert [t.id for t in a.tasks] == [t.id for t in b.tasks]
    assert json.loads(text) == json.loads(json.dumps(json.loads(text)))
    assert a.name == "paper-examples"


def test_fixture_builds_every_named_object():
    cfg = paper_examples()
    for name in cfg.section("models"):
        m = cfg.model(name)
        assert len(m.universe) > 0
