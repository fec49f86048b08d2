"""Acceptance criteria, each at its stated tolerance and time limit.

Every test prints one PASS/FAIL line (see the terminal summary section
"acceptance criteria").
"""

import json
import random
import re
import time
from fractions import Fraction

from dhc.automata import reach, reach_discrete, replay
from dhc.automata.network import TraceStep
from dhc.cli import main
from dhc.compose import compose, permission_conflicts_discrete
from dhc.dsl import bundled_rule_text, parse_rule_file, print_rule
from dhc.export import MODES, check_xta, to_dot, to_xta
from dhc.logic import chop_depth, evaluate, evaluate_oracle, parse_formula, pretty, safe_gap_on_junction
from dhc.spatial import enumerate_universe, default_universe

import gen

BUNDLED = ("ukhc_170", "ukhc_171", "demo_red_light", "demo_green_arrow")


class Clock:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t


def test_1_fig2_reproduction(criterion, snap):
    with Clock() as clk:
        plain = evaluate(safe_gap_on_junction("A"), snap("fig2"))
        shrunk = evaluate(safe_gap_on_junction("A"), snap("fig2_blocked"))
    criterion["detail"] = f"fig2 -> {plain}, shrunk gap -> {shrunk}, {clk.elapsed:.3f}s (limit 1s)"
    assert plain is True and shrunk is False
    assert clk.elapsed < 1


def test_2_chop_oracle_equivalence(criterion):
    agree = 0
    with Clock() as clk:
        for seed in range(200):
            rng = random.Random(seed)
            g = rng.choice([Fraction(1), Fraction(1, 2)])
            s = gen.random_snapshot(rng, g=g, length=8, max_cars=3)
            f = gen.random_formula(rng, 3, cars=[c.id for c in s.cars], g=g, max_len=8)
            v = gen.grid_interval(rng, 0, 8, g)
            agree += evaluate(f, s, v) == evaluate_oracle(f, s, v, grid_step=g / 2 ** chop_depth(f))
    criterion["detail"] = f"{agree}/200 agree, {clk.elapsed:.2f}s (limit 30s)"
    assert agree == 200
    assert clk.elapsed < 30


def test_3_zone_discrete_agreement(criterion):
    same = 0
    with Clock() as clk:
        for seed in range(100):
            rng = random.Random(seed)
            a = gen.random_automaton(rng, max_locs=4, max_clocks=2, max_const=5)
            scen = gen.sign_scenarios(rng, rng.randint(1, 3))
            same += reach(a, scen).locations == reach_discrete(a, scen).locations
    criterion["detail"] = f"{same}/100 identical location sets, {clk.elapsed:.2f}s (limit 60s)"
    assert same == 100
    assert clk.elapsed < 60


def test_4_rule_170(criterion, rule170, snap):
    with Clock() as clk:
        go = [snap("go")]
        r = reach(rule170, go)
        end = replay(rule170, go, r.trace("L3")).location if r.reachable("L3") else None
        blocked = reach(rule170, [snap("pedestrian")]).reachable("L3")
    criterion["detail"] = (f"enabling: L3 reachable={r.reachable('L3')} replay->{end}; "
                           f"pedestrian: L3 reachable={blocked}; {clk.elapsed:.2f}s (limit 5s)")
    assert end == "L3" and not blocked
    assert clk.elapsed < 5


def test_5_rule_171(criterion, rule171, snap):
    with Clock() as clk:
        without = reach(rule171, [snap("nosigns")]).reachable("L2")
        with_signs = reach(rule171, [snap("go")]).reachable("L2")
    criterion["detail"] = f"no signs: L2 reachable={without}; Stop+SWL: {with_signs}; {clk.elapsed:.2f}s (limit 5s)"
    assert not without and with_signs
    assert clk.elapsed < 5


def test_6_conflict_demo(criterion, capsys, catalog):
    with Clock() as clk:
        code = main(["conflicts", "demo_red_light.rule", "demo_green_arrow.rule", "--universe", "default",
                     "--json", "--oracle"])
        report = json.loads(capsys.readouterr().out)
        perm = [c for c in report["conflicts"] if c["kind"] == "PermissionConflict"]
        rules = [catalog["demo_red_light"].automaton, catalog["demo_green_arrow"].automaton]
        system = compose(rules)
        scen = list(enumerate_universe(default_universe(("GreenArrow", "RedLight"))))
        replayed = None
        discrete = permission_conflicts_discrete(system, scen)
        if len(perm) == 1:
            trace = [TraceStep(
                t["kind"], tuple(t["locations"]), t.get("snapshot"), t.get("rule"), t.get("transition"),
                t.get("action"), t.get("source"), t.get("target"),
            ) for t in perm[0]["trace"]]
            replayed = replay(system, scen, trace).locations
    locs = tuple(perm[0]["locations"].values()) if perm else None
    criterion["detail"] = (f"exit {code}, {len(perm)} permission conflict(s) "
                           f"{[c['action'] for c in perm]} at {locs}, replay->{replayed}, "
                           f"discrete {sorted(discrete)}, {clk.elapsed:.2f}s (limit 30s)")
    assert code == 1 and report["scenario_count"] == len(scen)
    assert len(perm) == 1 and perm[0]["action"] == "enter"
    assert replayed == locs
    assert report["oracle_agrees"] and discrete == {(locs, "enter")}
    assert clk.elapsed < 30


def test_7_bdi_sketch(criterion, capsys):
    code = main(["export", "ukhc_170.rule", "--format", "bdi"])
    lines = capsys.readouterr().out.splitlines()
    want = "~potential-collision : ~pedestrian-ahead <- checkForSafeGap;"
    criterion["detail"] = f"exit {code}, line present={want in lines}"
    assert code == 0 and want in lines


def test_8_export_validity(criterion, catalog):
    ok = []
    for name in BUNDLED:
        a = catalog[name].automaton
        for mode in MODES:
            check_xta(to_xta(a, mode))
        dot = to_dot(a)
        nodes = re.findall(r'^\s*"[^"]+" \[label=', dot, re.M)
        edges = re.findall(r'^\s*"[^"]+" -> "[^"]+"', dot, re.M)
        ok.append(len(nodes) == len(a.locations) and len(edges) == len(a.transitions))
    criterion["detail"] = f"XTA checked in {len(MODES)} modes for {len(BUNDLED)} rules; DOT counts match {sum(ok)}/{len(ok)}"
    assert all(ok)


def test_9_round_trips(criterion):
    with Clock() as clk:
        rules_ok = 0
        for name in BUNDLED:
            a = parse_rule_file(bundled_rule_text(name))
            rules_ok += parse_rule_file(print_rule(a)) == a
        for seed in range(100):
            a = gen.random_automaton(random.Random(seed))
            rules_ok += parse_rule_file(print_rule(a)) == a
        formulas_ok = 0
        for seed in range(500):
            f = gen.random_formula(random.Random(seed), 4, cars=("E", "A", "B"))
            formulas_ok += parse_formula(pretty(f)) == f
    criterion["detail"] = (f"rules {rules_ok}/{len(BUNDLED) + 100}, formulas {formulas_ok}/500, "
                           f"{clk.elapsed:.2f}s (limit 30s)")
    assert rules_ok == len(BUNDLED) + 100 and formulas_ok == 500
    assert clk.elapsed < 30
