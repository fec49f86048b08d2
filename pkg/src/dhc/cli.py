"""Command-line interface.

Exit codes: 0 success, 1 the analysis ran and found what it looks for
(a conflict, or a disagreement with ``--oracle``), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from . import __version__
from .automata import ReplayError, reach, reach_discrete, replay
from .automata.model import RuleAutomaton
from .compose import (
    as_scenarios, compose, find_permission_conflicts, find_timelocks, guard_contradiction_scan,
    permission_conflicts_discrete, sign_kinds, timelocks_discrete,
)
from .dsl import (
    RuleSyntaxError, SnapshotError, load_snapshot, load_universe, parse_rule_file, snapshot_to_json,
)
from .export import MODES, XtaExportError, to_bdi_sketch, to_dot, to_xta
from .logic import FormulaSyntaxError, evaluate, evaluate_oracle, explain, parse_formula
from .logic.evaluate import EvaluationError
from .spatial import Interval, SpatialDomainError, TrafficSnapshot, default_universe, rational

EXIT_OK, EXIT_FOUND, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _data_dir(sub: str) -> Path:
    return Path(str(resources.files("dhc.data").joinpath(sub)))


def _search(name: str, suffix: str, bundled: str) -> Path:
    p = Path(name)
    if p.is_file():
        return p
    dirs = [Path(d) for d in os.environ.get("DHC_RULE_PATH", "").split(os.pathsep) if d]
    dirs.append(_data_dir(bundled))
    for d in dirs:
        for cand in (d / name, d / (name + suffix)):
            if cand.is_file():
                return cand
    raise InputError(f"cannot find {name!r} (searched the working directory, DHC_RULE_PATH and bundled {bundled})")


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def load_rule(name: str, somewhere_brackets: bool = True) -> RuleAutomaton:
    path = _search(name, ".rule", "rules")
    try:
        return parse_rule_file(_read(path), somewhere_brackets=somewhere_brackets)
    except RuleSyntaxError as exc:
        raise InputError(f"{path}:{exc}") from None


def load_snapshot_file(name: str) -> TrafficSnapshot:
    path = _search(name, ".snapshot.json", "snapshots")
    try:
        return load_snapshot(_read(path))
    except SnapshotError as exc:
        raise InputError(f"{path}: {exc}") from None


def _brackets(args) -> bool:
    return args.somewhere_brackets == "on"


def _emit(args, text: str, payload: Optional[dict] = None):
    out = json.dumps(payload, indent=2, default=str) + "\n" if args.json and payload is not None else text
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


# -- commands ----------------------------------------------------------------

def cmd_eval(args) -> int:
    s = load_snapshot_file(args.snapshot)
    try:
        f = parse_formula(args.formula, somewhere_brackets=_brackets(args))
    except FormulaSyntaxError as exc:
        raise InputError(f"formula: {exc}") from None
    v = Interval(rational(args.view[0]), rational(args.view[1])) if args.view else s.extent
    env = dict(b.split("=", 1) for b in args.bind or [])
    try:
        value, splits = explain(f, s, v, env) if args.explain else (evaluate(f, s, v, env), [])
        oracle = evaluate_oracle(f, s, v, env) if args.oracle else None
    except (EvaluationError, SpatialDomainError) as exc:
        raise InputError(str(exc)) from None
    lines = [str(value).lower()]
    for w in splits:
        lines.append(f"  split {w.formula} on [{w.lo}, {w.hi}] at {w.split}")
    payload = {"formula": str(f), "view": [str(v.lo), str(v.hi)], "value": value,
               "splits": [{"formula": w.formula, "lo": str(w.lo), "split": str(w.split), "hi": str(w.hi)}
                          for w in splits]}
    code = EXIT_OK
    if oracle is not None:
        payload["oracle"] = oracle
        lines.append(f"oracle: {str(oracle).lower()}" + ("" if oracle == value else " (DISAGREES)"))
        if oracle != value:
            code = EXIT_FOUND
    _emit(args, "\n".join(lines) + "\n", payload)
    return code


def _terminal(a: RuleAutomaton, requested: Optional[str]) -> str:
    if requested:
        if requested not in a.location_names:
            raise InputError(f"rule {a.name!r} has no location {requested!r}")
        return requested
    for loc in a.locations:
        if loc.role and loc.role.lower() == "on road junction":
            return loc.name
    return a.locations[-1].name


def cmd_reach(args) -> int:
    a = load_rule(args.rule, _brackets(args))
    if not args.snapshots:
        raise InputError("reach needs at least one snapshot")
    scenarios = [load_snapshot_file(p) for p in args.snapshots]
    res = reach(a, scenarios)
    target = _terminal(a, args.target)
    trace = res.trace(target)
    locs = sorted(res.locations)
    lines = [f"reachable locations: {', '.join(locs)}"]
    lines.append(f"{target} {'reachable' if trace is not None else 'unreachable'}")
    payload = {"rule": a.name, "reachable": locs, "target": target, "target_reachable": trace is not None}
    code = EXIT_OK
    if trace is not None:
        replay(a, scenarios, trace)
        lines.append("witness trace:")
        lines += [f"  {t}" for t in trace]
        payload["trace"] = [t.to_json() for t in trace]
    if args.oracle:
        disc = reach_discrete(a, scenarios)
        agree = disc.locations == res.locations
        payload["oracle_agrees"] = agree
        lines.append("discrete oracle: " + ("agrees" if agree else f"DISAGREES ({sorted(disc.locations)})"))
        if not agree:
            code = EXIT_FOUND
    _emit(args, "\n".join(lines) + "\n", payload)
    return code


def _universe(args, rules) -> list[TrafficSnapshot]:
    if args.scenario:
        return [load_snapshot_file(p) for p in args.scenario]
    kinds = sign_kinds(rules)
    if args.universe in (None, "default"):
        return as_scenarios(default_universe(kinds))
    try:
        return as_scenarios(load_universe(_read(Path(args.universe)), kinds))
    except SnapshotError as exc:
        raise InputError(f"{args.universe}: {exc}") from None


def cmd_conflicts(args) -> int:
    if len(args.rules) < 2:
        raise InputError("need >= 2 rules")
    rules = [load_rule(r, _brackets(args)) for r in args.rules]
    try:
        system = compose(rules)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    scenarios = _universe(args, rules)
    if not scenarios:
        raise InputError("the universe contains no valid snapshot")
    from .automata.network import explore

    res = explore(system, scenarios)
    perm = find_permission_conflicts(system, scenarios, res)
    locks = find_timelocks(system, scenarios, res)
    contra = guard_contradiction_scan(rules, scenarios, res.table)
    for rep in perm + locks:
        replay(system, scenarios, rep.trace)
    lines = [f"{len(scenarios)} scenario snapshots, {len(res.zones)} reachable location tuples"]
    lines.append(f"permission conflicts: {len(perm)}")
    lines += [str(r) for r in perm]
    lines.append(f"timelocks: {len(locks)}")
    lines += [str(r) for r in locks]
    lines.append(f"guard contradictions: {len(contra)}")
    lines += [f"  {c}" for c in contra]
    payload = {
        "rules": [a.name for a in rules],
        "scenario_count": len(scenarios),
        "conflicts": [r.to_json() for r in perm + locks] + [c.to_json() for c in contra],
    }
    if args.oracle:
        agree = (permission_conflicts_discrete(system, scenarios, res.table) == {(r.locations, r.action) for r in perm}
                 and timelocks_discrete(system, scenarios, res.table) == {r.locations for r in locks})
        payload["oracle_agrees"] = agree
        lines.append("discrete oracle: " + ("agrees" if agree else "DISAGREES"))
    found = bool(perm or locks or contra) or (args.oracle and not payload["oracle_agrees"])
    text = "\n".join(lines) + "\n"
    if found and not args.json and not args.out:
        # conflicts always come with the machine-readable report
        text += json.dumps(payload, indent=2) + "\n"
    _emit(args, text, payload)
    return EXIT_FOUND if found else EXIT_OK


def cmd_export(args) -> int:
    rules = [load_rule(r, _brackets(args)) for r in args.rules]
    if args.format != "dot" and len(rules) != 1:
        raise InputError(f"--format {args.format} takes exactly one rule")
    try:
        if args.format == "xta":
            text = to_xta(rules[0], args.mode)
        elif args.format == "dot":
            text = to_dot(rules[0] if len(rules) == 1 else compose(rules))
        else:
            sketch = to_bdi_sketch(rules[0])
            for w in sketch.warnings:
                print(f"warning: {w}", file=sys.stderr)
            text = str(sketch)
    except (XtaExportError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = []
    bad = 0
    for p in args.paths:
        try:
            if p.endswith(".json"):
                s = load_snapshot_file(p)
                results.append({"path": p, "ok": True, "kind": "snapshot", "cars": list(s.car_ids)})
            else:
                a = load_rule(p, _brackets(args))
                results.append({"path": p, "ok": True, "kind": "rule", "name": a.name,
                                "locations": len(a.locations), "transitions": len(a.transitions)})
        except InputError as exc:
            bad += 1
            results.append({"path": p, "ok": False, "error": str(exc)})
    lines = [f"{r['path']}: ok" if r["ok"] else f"{r['path']}: {r['error']}" for r in results]
    _emit(args, "\n".join(lines) + "\n", {"results": results})
    return EXIT_INPUT if bad else EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--out", metavar="PATH", help="write the result to PATH")
    common.add_argument("--somewhere-brackets", choices=("on", "off"), default="on",
                        help="read <<f>> as 'somewhere f' (on) or as plain grouping (off)")

    p = argparse.ArgumentParser(prog="dhc", description="Check machine-readable traffic rules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a formula on a snapshot")
    e.add_argument("formula")
    e.add_argument("snapshot")
    e.add_argument("--view", nargs=2, metavar=("LO", "HI"))
    e.add_argument("--bind", action="append", metavar="VAR=CAR", help="bind a free variable")
    e.add_argument("--explain", action="store_true", help="print chop split points")
    e.add_argument("--oracle", action="store_true", help="cross-check with the grid oracle")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("reach", parents=[common], help="reachability of one rule under snapshots")
    r.add_argument("rule")
    r.add_argument("snapshots", nargs="*")
    r.add_argument("--target", help="location to report on (default: the 'on road junction' location)")
    r.add_argument("--oracle", action="store_true", help="cross-check with discrete-time search")
    r.set_defaults(func=cmd_reach)

    c = sub.add_parser("conflicts", parents=[common], help="compose rules and search for conflicts")
    c.add_argument("rules", nargs="+")
    c.add_argument("--universe", default="default", help="'default' or a universe JSON file")
    c.add_argument("--scenario", action="append", metavar="SNAPSHOT", help="use these snapshots instead")
    c.add_argument("--oracle", action="store_true", help="cross-check with discrete-time search")
    c.set_defaults(func=cmd_conflicts)

    x = sub.add_parser("export", parents=[common], help="export a rule as XTA, DOT or BDI plans")
    x.add_argument("rules", nargs="+")
    x.add_argument("--format", choices=("xta", "dot", "bdi"), required=True)
    x.add_argument("--mode", choices=MODES, default="bool-env", help="XTA lowering of spatial formulas")
    x.set_defaults(func=cmd_export)

    v = sub.add_parser("validate", parents=[common], help="validate rule and snapshot files")
    v.add_argument("paths", nargs="+")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ReplayError as exc:
        print(f"internal error: witness does not replay: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
