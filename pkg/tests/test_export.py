import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from dhc.automata import Location, RuleAutomaton
from dhc.compose import compose
from dhc.dsl import bundled_rule_text
from dhc.export import MODES, XtaExportError, XtaSyntaxError, check_xta, to_bdi_sketch, to_dot, to_xta

import gen

BUNDLED = ("ukhc_170", "ukhc_171", "demo_red_light", "demo_green_arrow")
CHECK_FOR_SAFE_GAP = "~potential-collision : ~pedestrian-ahead <- checkForSafeGap;"


def _distinct_guards(text):
    """Distinct guard strings in a rule file, a negated guard counting as its base."""
    out = set()
    for g in re.findall(r'guard: "(.*)";', text):
        m = re.fullmatch(r"not \((.*)\)", g) or re.fullmatch(r"not (<<.*>>)", g)
        out.add(m.group(1) if m else g)
    return out


def _dot_counts(text):
    nodes = re.findall(r'^\s*"([^"]+)" \[label=', text, re.M)
    edges = re.findall(r'^\s*"[^"]+" -> "[^"]+"', text, re.M)
    return nodes, edges


# -- XTA -----------------------------------------------------------------------

def test_170_bool_env_counts(rule170):
    text = to_xta(rule170, "bool-env")
    info = check_xta(text)
    proc = info.processes["Rule_ukhc_170"]
    assert len(proc.locations) == 4 and proc.clocks == ["x"]
    assert len(info.bools) == len(_distinct_guards(bundled_rule_text("ukhc_170"))) == 3


@pytest.mark.parametrize("name", BUNDLED)
@pytest.mark.parametrize("mode", MODES)
def test_bundled_xta_checks(catalog, name, mode):
    a = catalog[name].automaton
    info = check_xta(to_xta(a, mode))
    proc = next(p for n, p in info.processes.items() if n != "Env")
    assert len(proc.locations) == len(a.locations)
    assert len(proc.edges) == len(a.transitions)
    if mode == "comment":
        assert info.bools == []


def test_xta_deterministic(rule171):
    assert to_xta(rule171) == to_xta(rule171)


def test_empty_alphabet():
    a = RuleAutomaton("idle", ("x",), (), (Location("L0", initial=True),), ())
    for mode in MODES:
        info = check_xta(to_xta(a, mode))
        assert info.processes["Rule_idle"].edges == []


def test_bad_identifier():
    a = RuleAutomaton("r", ("int",), (), (Location("L0", initial=True),), ())
    with pytest.raises(XtaExportError, match="int"):
        to_xta(a)


def test_unknown_mode(rule170):
    with pytest.raises(ValueError):
        to_xta(rule170, "symbolic")


@pytest.mark.parametrize("text", [
    "clock x; system P;",
    "process P() { state a; init b; } system P;",
    "process P() { clock x; state a; init a; trans a -> a { guard y > 1; }; } system P;",
    "process P() { state a; init a; } system Q;",
])
def test_checker_rejects(text):
    with pytest.raises(XtaSyntaxError):
        check_xta(text)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generated_xta_checks(seed):
    a = gen.random_automaton(random.Random(seed))
    for mode in MODES:
        proc = check_xta(to_xta(a, mode)).processes["Rule_R"]
        assert len(proc.edges) == len(a.transitions)


# -- DOT -----------------------------------------------------------------------

def test_171_dot(rule171):
    text = to_dot(rule171)
    nodes, edges = _dot_counts(text)
    assert nodes == ["L0", "L1", "L2", "L3"] and len(edges) == 4
    assert re.search(r'"L1" -> "L2" \[label="stop\\nob\(Stop\) and ob\(SWL\)', text)
    assert text.count("peripheries=2") == 1


@pytest.mark.parametrize("name", BUNDLED)
def test_dot_counts(catalog, name):
    a = catalog[name].automaton
    nodes, edges = _dot_counts(to_dot(a))
    assert len(nodes) == len(set(nodes)) == len(a.locations)
    assert len(edges) == len(a.transitions)


def test_product_dot(rule170, rule171):
    nodes, edges = _dot_counts(to_dot(compose([rule170, rule171])))
    assert "L0|L0" in nodes and len(nodes) == 16
    out_a = {l: len(rule170.outgoing(l)) for l in rule170.location_names}
    out_b = {l: len(rule171.outgoing(l)) for l in rule171.location_names}
    assert len(edges) == sum(out_a[x] + out_b[y] for x in out_a for y in out_b)


# -- BDI -----------------------------------------------------------------------

def test_check_for_safe_gap(rule170):
    assert CHECK_FOR_SAFE_GAP in str(to_bdi_sketch(rule170)).splitlines()


def test_true_guard_starts():
    text = 'rule "r" { clocks: x; alphabet: a, b; location L0 { initial; } location L1 { } location L2 { }\n' \
           "transition L0 -> L1 { action: a; } transition L0 -> L2 { action: b; } }"
    from dhc.dsl import parse_rule_file

    sk = to_bdi_sketch(parse_rule_file(text))
    assert [str(l) for l in sk.lines] == ["start <- a;", "start <- b;"]
    assert all(l.trigger == "start" and l.guards == () for l in sk.lines)


def test_composite_guard_warns(rule170):
    sk = to_bdi_sketch(rule170)
    assert len(sk.lines) == len(rule170.transitions)
    assert sk.warnings  # the retry guard is a negated conjunction


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bdi_total_and_deterministic(seed):
    a = gen.random_automaton(random.Random(seed))
    one, two = to_bdi_sketch(a), to_bdi_sketch(a)
    assert str(one) == str(two) and len(one.lines) == len(a.transitions)
