import json

import pytest

from dhc.cli import main
from dhc.export import check_xta

SGI_BODY = "(re(A) and not cs) chop (free and not cs) chop (sg(A) and cs)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_free_empty(capsys):
    assert run(capsys, "eval", "free", "empty") == (0, "true\n", "")


def test_eval_sgi_fig2(capsys):
    code, out, _ = run(capsys, "eval", SGI_BODY, "fig2.snapshot.json", "--explain", "--oracle")
    assert code == 0 and out.startswith("true")


def test_eval_cs_view(capsys):
    code, out, _ = run(capsys, "eval", "cs", "fig2", "--view", "0", "2")
    assert code == 0 and out.strip() == "false"


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "re(c)", "fig2", "--bind", "c=A", "--view", "0", "1", "--json")
    assert code == 0 and json.loads(out)["value"] is True


@pytest.mark.parametrize("argv", [
    ("eval", "free and", "empty"),
    ("eval", "free", "no-such-snapshot"),
    ("eval", "free", "empty", "--view", "0", "99"),
    ("eval", "pc(c)", "empty"),
])
def test_eval_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_reach_go(capsys):
    code, out, _ = run(capsys, "reach", "ukhc_170.rule", "go.snapshot.json", "--oracle")
    assert code == 0 and "L3 reachable" in out and "arrive" in out


def test_reach_pedestrian(capsys):
    code, out, _ = run(capsys, "reach", "ukhc_170", "pedestrian")
    assert code == 0 and "L3 unreachable" in out


def test_reach_missing(capsys):
    assert run(capsys, "reach", "missing.rule", "go")[0] == 2


def test_rule_path_env(capsys, tmp_path, monkeypatch):
    (tmp_path / "mine.rule").write_text(
        'rule "mine" { clocks: x; alphabet: a; location L0 { initial; } location L1 { }\n'
        'transition L0 -> L1 { action: a; } }\n')
    monkeypatch.setenv("DHC_RULE_PATH", str(tmp_path))
    code, out, _ = run(capsys, "reach", "mine", "go", "--target", "L1")
    assert code == 0 and "L1 reachable" in out


def test_conflicts_single_rule(capsys):
    code, _, err = run(capsys, "conflicts", "ukhc_170")
    assert code == 2 and "need >= 2 rules" in err


def _pair(tmp_path, forbid):
    (tmp_path / "a.rule").write_text(
        f'rule "a" {{ clocks: x; alphabet: go; location L0 {{ initial; {forbid} }} location L1 {{ }}\n'
        'transition L0 -> L1 { action: go; guard: "ob(Stop)"; clock: x >= 1; } }\n')
    (tmp_path / "b.rule").write_text(
        'rule "b" { clocks: x; alphabet: go; location L0 { initial; } location L1 { }\n'
        'transition L0 -> L1 { action: go; } }\n')
    return str(tmp_path / "a.rule"), str(tmp_path / "b.rule")


def test_conflicts_found_and_clean(capsys, tmp_path):
    a, b = _pair(tmp_path, "forbid: go;")
    code, out, _ = run(capsys, "conflicts", a, b, "--scenario", "go", "--json", "--oracle")
    report = json.loads(out)
    assert code == 1 and report["oracle_agrees"]
    assert [c["action"] for c in report["conflicts"]] == ["go"]
    a, b = _pair(tmp_path, "")
    assert run(capsys, "conflicts", a, b, "--scenario", "go")[0] == 0


def test_export_bdi(capsys):
    code, out, _ = run(capsys, "export", "ukhc_170", "--format", "bdi")
    assert code == 0 and "~potential-collision : ~pedestrian-ahead <- checkForSafeGap;" in out.splitlines()


def test_export_xta_checks(capsys, tmp_path):
    target = tmp_path / "r.xta"
    assert run(capsys, "export", "ukhc_170", "--format", "xta", "--mode", "bool-env", "--out", str(target))[0] == 0
    assert check_xta(target.read_text())


def test_export_dot_and_deterministic(capsys):
    first = run(capsys, "export", "ukhc_171", "--format", "dot")
    second = run(capsys, "export", "ukhc_171", "--format", "dot")
    assert first[0] == 0 and first == second and first[1].startswith("digraph")


def test_export_bad_format(capsys):
    assert run(capsys, "export", "ukhc_171", "--format", "svg")[0] == 2


def test_validate(capsys):
    assert run(capsys, "validate", "ukhc_170", "demo_green_arrow.rule", "fig2.snapshot.json")[0] == 0
    assert run(capsys, "validate", "nope.rule")[0] == 2


def test_no_command(capsys):
    assert run(capsys)[0] == 2
