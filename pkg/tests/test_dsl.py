import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dhc.automata import reach, validate_automaton
from dhc.dsl import (
    RuleSemanticError, RuleSyntaxError, SnapshotError, bundled_rule_text, dump_snapshot, load_snapshot,
    load_universe, parse_rule_file, print_rule,
)
from dhc.logic import evaluate, parse_formula, safe_gap_on_junction

import gen

BUNDLED = ("ukhc_170", "ukhc_171", "demo_red_light", "demo_green_arrow")

MINI = """rule "mini" {
  clocks: x;
  alphabet: go;
  location L0 { initial; }
  location L1 { }
  transition L0 -> L1 { action: go; }
}
"""


def _snap_json(**over):
    d = {
        "extent": [0, 20], "ego": "E", "cars": [{"id": "E", "reservation": [0, 2], "size": 2}],
        "crossing": [8, 14], "pedestrians": [], "signs": [], "perception_distance": 0, "approach_distance": 0,
    }
    d.update(over)
    return json.dumps(d)


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_roundtrip(name):
    a = parse_rule_file(bundled_rule_text(name))
    assert parse_rule_file(print_rule(a)) == a
    assert print_rule(parse_rule_file(print_rule(a))) == print_rule(a)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generated_roundtrip(seed):
    a = gen.random_automaton(random.Random(seed))
    assert parse_rule_file(print_rule(a)) == a


def test_170_shape(rule170):
    assert len(rule170.locations) == 4 and rule170.clocks == ("x",)
    assert rule170.initial.name == "L0" and rule170.initial.role == "away from road junction"
    check = next(t for t in rule170.transitions if t.action == "check")
    assert check.spatial_guard == parse_formula("not exists c : pc(c) and not pa(E)")
    assert dict(rule170.constants) == {"t1": 1, "t2": 3}


def test_171_stop_guard(rule171):
    stop = next(t for t in rule171.transitions if (t.source, t.target) == ("L1", "L2"))
    assert stop.spatial_guard == parse_formula("ob(Stop) and ob(SWL)")


def test_mini_parses():
    a = parse_rule_file(MINI)
    assert a.location_names == ("L0", "L1") and len(a.transitions) == 1


def test_undeclared_location_position():
    text = MINI.replace("L0 -> L1", "L9 -> L1")
    with pytest.raises(RuleSemanticError) as exc:
        parse_rule_file(text)
    assert "L9" in str(exc.value)
    assert exc.value.line == 6


@pytest.mark.parametrize("bad, needle", [
    ('location L0 { }', "duplicate"),
    ('transition L0 -> L1 { action: go; clock: z >= 1; }', "z"),
    ('transition L0 -> L1 { action: jump; }', "jump"),
    ('transition L0 -> L1 { action: go; guard: "pc(c)"; }', "c"),
])
def test_semantic_errors(bad, needle):
    text = MINI.replace("  location L1 { }", "  location L1 { }\n  " + bad)
    with pytest.raises(RuleSemanticError) as exc:
        parse_rule_file(text)
    assert needle in str(exc.value)


def test_syntax_error_has_position():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_rule_file(MINI.replace("clocks: x;", "clocks x;"))
    assert exc.value.line == 2
    assert str(exc.value).startswith("2:")


def test_guard_syntax_error_maps_into_file():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_rule_file(MINI.replace("action: go;", 'action: go; guard: "free and";'))
    assert exc.value.line == 6


def test_somewhere_brackets_off():
    text = MINI.replace("action: go;", 'action: go; guard: "<<free>>";')
    on = parse_rule_file(text).transitions[0].spatial_guard
    off = parse_rule_file(text, somewhere_brackets=False).transitions[0].spatial_guard
    assert type(on).__name__ == "Somewhere" and type(off).__name__ == "Free"




# -- snapshots ---------------------------------------------------------------

def test_fig2_sg_i(snap):
    assert evaluate(safe_gap_on_junction("A"), snap("fig2"))


def test_exact_rational():
    s = load_snapshot(_snap_json(signs=[{"kind": "Stop", "at": "7/2"}]))
    assert s.signs[0].at == Fraction(7, 2)
    s = load_snapshot(_snap_json(perception_distance=0.1))
    assert s.perception_distance == Fraction(1, 10)


def test_car_outside_extent():
    with pytest.raises(SnapshotError, match="outside extent"):
        load_snapshot(_snap_json(cars=[{"id": "E", "reservation": [0, 2], "size": 2},
                                       {"id": "B", "reservation": [18, 22], "size": 2}]))


def test_unknown_key_rejected():
    with pytest.raises(SnapshotError, match="schema"):
        load_snapshot(_snap_json(weather="rain"))


def test_malformed_json():
    with pytest.raises(SnapshotError, match="malformed"):
        load_snapshot("{")


def test_snapshot_roundtrip(snap):
    for name in ("go", "fig2", "pedestrian", "oncoming"):
        s = snap(name)
        assert load_snapshot(dump_snapshot(s)) == s


def test_universe_unknown_key():
    with pytest.raises(SnapshotError):
        load_universe('{"max_cars": 1, "colour": "red"}')


# -- catalog -----------------------------------------------------------------

def test_catalog_contents(catalog):
    assert set(BUNDLED) <= set(catalog)
    for entry in catalog.values():
        assert validate_automaton(entry.automaton) == []
        assert len(entry.enabling) + len(entry.blocking) >= 2


def test_catalog_enabling_and_blocking(catalog):
    for entry in catalog.values():
        for name, s in entry.enabling.items():
            assert reach(entry.automaton, [s]).reachable(entry.terminal), (entry.name, name)
        for name, s in entry.blocking.items():
            assert not reach(entry.automaton, [s]).reachable(entry.terminal), (entry.name, name)
