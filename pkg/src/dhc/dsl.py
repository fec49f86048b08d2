"""Rule files (``.rule``) and snapshot files (``.snapshot.json``).

Rule file grammar::

    file        := "rule" STRING "{" item* "}"
    item        := "clocks" ":" [ids] ";" | "alphabet" ":" [ids] ";"
                 | "const" ID "=" NUMBER ";" | "note" STRING ";"
                 | "location" ID "{" loc_item* "}"
                 | "transition" ID "->" ID "{" edge_item* "}"
    loc_item    := "initial" ";" | "invariant" ":" cc ";" | "spatial" ":" STRING ";"
                 | "forbid" ":" [ids] ";" | "role" ":" STRING ";"
    edge_item   := "action" ":" ID ";" | "guard" ":" STRING ";"
                 | "clock" ":" cc ";" | "reset" ":" [ids] ";"
    cc          := "true" | ID ("<=" | ">=") (INT | ID) ("and" ...)*
    ids         := ID ("," ID)*

Formulas are quoted strings in the formula language. ``//`` and ``#``
start comments.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

import jsonschema

from .automata.model import ClockAtom, ClockConstraint, Location, RuleAutomaton, Transition, validate_automaton
from .logic.formula import Formula, TrueF, free_variables
from .logic.parser import FormulaSyntaxError, UnboundVariableError, parse_formula
from .logic.printer import pretty
from .spatial import (
    CarOccupancy, Interval, Pedestrian, Sign, TrafficSnapshot, UniverseParams, rational, validate_snapshot,
)


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class RuleSemanticError(RuleSyntaxError):
    pass


class SnapshotError(ValueError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<num>-?\d+(?:/\d+|\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|>=|[{}:;,=])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind, lexeme = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _RuleParser:
    def __init__(self, text: str, somewhere_brackets: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.somewhere_brackets = somewhere_brackets

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None, semantic=False):
        tok = tok or self.cur
        cls = RuleSemanticError if semantic else RuleSyntaxError
        raise cls(msg, tok.line, tok.col)

    def next(self) -> _Tok:
        tok = self.cur
        self.i += 1
        return tok

    def expect_op(self, op):
        if self.cur.kind != "op" or self.cur.text != op:
            self.error(f"expected {op!r}, found {self.cur.text or 'end of file'!r}")
        return self.next()

    def expect_kind(self, kind, what):
        if self.cur.kind != kind:
            self.error(f"expected {what}, found {self.cur.text or 'end of file'!r}")
        return self.next()

    def keyword(self, word):
        tok = self.cur
        if tok.kind != "ident" or tok.text != word:
            self.error(f"expected {word!r}, found {tok.text or 'end of file'!r}")
        return self.next()

    def ids(self) -> list[_Tok]:
        out = []
        if self.cur.kind == "op" and self.cur.text == ";":
            return out
        out.append(self.expect_kind("ident", "an identifier"))
        while self.cur.kind == "op" and self.cur.text == ",":
            self.next()
            out.append(self.expect_kind("ident", "an identifier"))
        return out

    def clock_constraint(self) -> list[tuple[ClockAtom, _Tok]]:
        if self.cur.kind == "ident" and self.cur.text == "true":
            self.next()
            return []
        atoms = []
        while True:
            clock = self.expect_kind("ident", "a clock name")
            if self.cur.kind != "op" or self.cur.text not in ("<=", ">="):
                self.error("expected '<=' or '>=' (only closed clock constraints are supported)")
            op = self.next().text
            if self.cur.kind == "num":
                val = Fraction(self.cur.text)
                if val.denominator != 1 or val < 0:
                    self.error("clock bounds must be nonnegative integers")
                bound = int(val)
                self.next()
            else:
                bound = self.expect_kind("ident", "an integer or constant name").text
            atoms.append((ClockAtom(clock.text, op, bound), clock))
            if self.cur.kind == "ident" and self.cur.text == "and":
                self.next()
                continue
            return atoms

    def formula(self) -> tuple[Formula, _Tok]:
        tok = self.expect_kind("string", "a quoted formula")
        try:
            f = parse_formula(
                _unquote(tok.text), somewhere_brackets=self.somewhere_brackets,
                closed=True, origin=(tok.line, tok.col + 1),
            )
        except FormulaSyntaxError as exc:
            cls = RuleSemanticError if isinstance(exc, UnboundVariableError) else RuleSyntaxError
            raise cls(exc.message, exc.line, exc.column) from None
        return f, tok

    def parse(self) -> RuleAutomaton:
        self.keyword("rule")
        name_tok = self.expect_kind("string", "the rule name")
        self.expect_op("{")
        clocks: list[str] = []
        alphabet: list[str] = []
        consts: list[tuple[str, Fraction]] = []
        notes: list[str] = []
        locations: list[tuple[Location, _Tok]] = []
        transitions: list[tuple[Transition, _Tok, dict]] = []
        while not (self.cur.kind == "op" and self.cur.text == "}"):
            tok = self.expect_kind("ident", "a rule item")
            word = tok.text
            if word in ("clocks", "alphabet"):
                self.expect_op(":")
                names = [t.text for t in self.ids()]
                self.expect_op(";")
                (clocks if word == "clocks" else alphabet).extend(names)
            elif word == "const":
                cname = self.expect_kind("ident", "a constant name")
                self.expect_op("=")
                val = Fraction(self.expect_kind("num", "a number").text)
                self.expect_op(";")
                if any(n == cname.text for n, _ in consts):
                    self.error(f"duplicate constant {cname.text!r}", cname, semantic=True)
                consts.append((cname.text, val))
            elif word == "note":
                notes.append(_unquote(self.expect_kind("string", "a quoted note").text))
                self.expect_op(";")
            elif word == "location":
                locations.append(self.location())
            elif word == "transition":
                transitions.append(self.transition())
            else:
                self.error(f"unknown rule item {word!r}", tok)
        self.expect_op("}")
        if self.cur.kind != "eof":
            self.error(f"unexpected {self.cur.text!r} after rule")

        # semantic checks with positions
        const_names = {n for n, _ in consts}
        seen = {}
        for loc, tok, _ in locations:
            if loc.name in seen:
                self.error(f"duplicate location {loc.name!r}", tok, semantic=True)
            seen[loc.name] = tok

        def check_cc(pairs):
            for atom, ctok in pairs:
                if atom.clock not in clocks:
                    self.error(f"unknown clock {atom.clock!r}", ctok, semantic=True)
                if isinstance(atom.bound, str) and atom.bound not in const_names:
                    self.error(f"unknown constant {atom.bound!r}", ctok, semantic=True)

        for _, _, inv_toks in locations:
            check_cc(inv_toks)
        for t, tok, extra in transitions:
            for end, etok in ((t.source, extra["src"]), (t.target, extra["dst"])):
                if end not in seen:
                    self.error(f"transition from/to undeclared location {end!r}", etok, semantic=True)
            check_cc(extra["cc"])
            for c, ctok in extra["resets"]:
                if c not in clocks:
                    self.error(f"reset of unknown clock {c!r}", ctok, semantic=True)
            if t.action not in alphabet:
                self.error(f"action {t.action!r} not declared in alphabet", extra["action"], semantic=True)

        a = RuleAutomaton(
            name=_unquote(name_tok.text),
            clocks=tuple(clocks),
            alphabet=tuple(alphabet),
            locations=tuple(loc for loc, _, _ in locations),
            transitions=tuple(t for t, _, _ in transitions),
            constants=tuple(consts),
            notes=tuple(notes),
        )
        problems = validate_automaton(a)
        if problems:
            self.error(problems[0], name_tok, semantic=True)
        return a

    def location(self):
        name = self.expect_kind("ident", "a location name")
        self.expect_op("{")
        initial = False
        inv: list = []
        spatial = None
        forbid: list[str] = []
        role = None
        while not (self.cur.kind == "op" and self.cur.text == "}"):
            tok = self.expect_kind("ident", "a location item")
            w = tok.text
            if w == "initial":
                initial = True
            elif w == "invariant":
                self.expect_op(":")
                inv = self.clock_constraint()
            elif w == "spatial":
                self.expect_op(":")
                spatial, _ = self.formula()
            elif w == "forbid":
                self.expect_op(":")
                forbid = [t.text for t in self.ids()]
            elif w == "role":
                self.expect_op(":")
                role = _unquote(self.expect_kind("string", "a quoted role").text)
            else:
                self.error(f"unknown location item {w!r}", tok)
            self.expect_op(";")
        self.expect_op("}")
        loc = Location(name.text, ClockConstraint(tuple(a for a, _ in inv)), spatial, initial, tuple(forbid), role)
        return loc, name, inv

    def transition(self):
        src = self.expect_kind("ident", "a source location")
        self.expect_op("->")
        dst = self.expect_kind("ident", "a target location")
        self.expect_op("{")
        action = None
        guard: Formula = TrueF()
        cc: list = []
        resets: list[_Tok] = []
        while not (self.cur.kind == "op" and self.cur.text == "}"):
            tok = self.expect_kind("ident", "a transition item")
            w = tok.text
            self.expect_op(":")
            if w == "action":
                action = self.expect_kind("ident", "an action label")
            elif w == "guard":
                guard, _ = self.formula()
            elif w == "clock":
                cc = self.clock_constraint()
            elif w == "reset":
                resets = self.ids()
            else:
                self.error(f"unknown transition item {w!r}", tok)
            self.expect_op(";")
        end = self.expect_op("}")
        if action is None:
            self.error("transition without an action", end)
        t = Transition(
            src.text, dst.text, action.text, guard,
            ClockConstraint(tuple(a for a, _ in cc)), tuple(r.text for r in resets),
        )
        return t, src, {"src": src, "dst": dst, "cc": cc, "resets": [(r.text, r) for r in resets], "action": action}


def parse_rule_file(text: str, *, somewhere_brackets: bool = True) -> RuleAutomaton:
    """Parse and fully validate a rule file; errors carry line:column."""
    return _RuleParser(text, somewhere_brackets).parse()


def print_rule(a: RuleAutomaton) -> str:
    """Canonical text of ``a``; ``parse_rule_file(print_rule(a)) == a``."""
    out = [f"rule {_quote(a.name)} {{"]
    for n in a.notes:
        out.append(f"  note {_quote(n)};")
    out.append(f"  clocks: {', '.join(a.clocks)};")
    out.append(f"  alphabet: {', '.join(a.alphabet)};")
    for name, val in a.constants:
        out.append(f"  const {name} = {val};")
    out.append("")
    for loc in a.locations:
        items = []
        if loc.initial:
            items.append("initial;")
        if loc.role is not None:
            items.append(f"role: {_quote(loc.role)};")
        if loc.invariant:
            items.append(f"invariant: {loc.invariant};")
        if loc.spatial_invariant is not None:
            items.append(f"spatial: {_quote(pretty(loc.spatial_invariant))};")
        if loc.forbid:
            items.append(f"forbid: {', '.join(loc.forbid)};")
        out.append(f"  location {loc.name} {{ {' '.join(items)} }}" if items else f"  location {loc.name} {{ }}")
    out.append("")
    for t in a.transitions:
        out.append(f"  transition {t.source} -> {t.target} {{")
        out.append(f"    action: {t.action};")
        if not isinstance(t.spatial_guard, TrueF):
            out.append(f"    guard: {_quote(pretty(t.spatial_guard))};")
        if t.clock_guard:
            out.append(f"    clock: {t.clock_guard};")
        if t.resets:
            out.append(f"    reset: {', '.join(t.resets)};")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


# -- snapshots ---------------------------------------------------------------

def snapshot_schema() -> dict:
    return json.loads(resources.files("dhc.data").joinpath("snapshot.schema.json").read_text())


def _iv(pair) -> Interval:
    return Interval(rational(pair[0]), rational(pair[1]))


def snapshot_from_json(data: dict) -> TrafficSnapshot:
    try:
        jsonschema.validate(data, snapshot_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise SnapshotError(f"schema violation at {where}: {exc.message}") from None
    try:
        s = TrafficSnapshot(
            extent=_iv(data["extent"]),
            ego_id=data["ego"],
            cars=tuple(
                CarOccupancy(
                    c["id"], _iv(c["reservation"]), rational(c["size"]),
                    _iv(c["claim"]) if c.get("claim") is not None else None,
                )
                for c in data["cars"]
            ),
            crossing=_iv(data["crossing"]),
            pedestrians=tuple(Pedestrian(_iv(p["on"]), bool(p["started_crossing"])) for p in data["pedestrians"]),
            signs=tuple(Sign(g["kind"], rational(g["at"])) for g in data["signs"]),
            perception_distance=rational(data["perception_distance"]),
            approach_distance=rational(data["approach_distance"]),
        )
    except (ValueError, TypeError) as exc:
        raise SnapshotError(str(exc)) from None
    problems = validate_snapshot(s)
    if problems:
        raise SnapshotError("invalid snapshot: " + "; ".join(problems))
    return s


def load_snapshot(text: str) -> TrafficSnapshot:
    """Parse snapshot JSON; decimal numbers are read exactly from their text."""
    try:
        data = json.loads(text, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"malformed JSON: {exc}") from None
    return snapshot_from_json(_fractions_to_str(data))


def _fractions_to_str(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, list):
        return [_fractions_to_str(v) for v in x]
    if isinstance(x, dict):
        return {k: _fractions_to_str(v) for k, v in x.items()}
    return x


def _num(q: Fraction):
    return int(q) if q.denominator == 1 else str(q)


def snapshot_to_json(s: TrafficSnapshot) -> dict:
    def iv(i: Interval):
        return [_num(i.lo), _num(i.hi)]

    cars = []
    for c in s.cars:
        d = {"id": c.id, "reservation": iv(c.reservation), "size": _num(c.size)}
        if c.claim is not None:
            d["claim"] = iv(c.claim)
        cars.append(d)
    return {
        "extent": iv(s.extent),
        "ego": s.ego_id,
        "cars": cars,
        "crossing": iv(s.crossing),
        "pedestrians": [{"on": iv(p.on), "started_crossing": p.started_crossing} for p in s.pedestrians],
        "signs": [{"kind": g.kind, "at": _num(g.at)} for g in s.signs],
        "perception_distance": _num(s.perception_distance),
        "approach_distance": _num(s.approach_distance),
    }


def dump_snapshot(s: TrafficSnapshot) -> str:
    return json.dumps(snapshot_to_json(s), indent=2) + "\n"


# -- bundled assets ----------------------------------------------------------

@dataclass
class BundledRule:
    name: str
    automaton: RuleAutomaton
    source: str
    terminal: str
    enabling: dict = field(default_factory=dict)  # snapshot name -> snapshot
    blocking: dict = field(default_factory=dict)


def _data():
    return resources.files("dhc.data")


def bundled_snapshot(name: str) -> TrafficSnapshot:
    return load_snapshot(_data().joinpath("snapshots", f"{name}.snapshot.json").read_text())


def bundled_rule_text(name: str) -> str:
    return _data().joinpath("rules", f"{name}.rule").read_text()


def bundled_rules() -> dict[str, BundledRule]:
    """Catalog of shipped rules with enabling and blocking example snapshots."""
    catalog = json.loads(_data().joinpath("catalog.json").read_text())
    out = {}
    for name, entry in catalog.items():
        text = bundled_rule_text(name)
        out[name] = BundledRule(
            name=name,
            automaton=parse_rule_file(text),
            source=text,
            terminal=entry["terminal"],
            enabling={s: bundled_snapshot(s) for s in entry["enabling"]},
            blocking={s: bundled_snapshot(s) for s in entry["blocking"]},
        )
    return out


_UNIVERSE_KEYS = {
    "max_cars", "position_grid_step", "car_sizes", "extent", "crossing", "pedestrian_options",
    "sign_kinds", "ego_id", "ego_reservation", "ego_claim", "ego_size", "sign_position",
    "perception_distance", "approach_distance",
}


def load_universe(text: str, default_sign_kinds=()) -> UniverseParams:
    """Universe parameters from JSON; ``sign_kinds`` defaults to ``default_sign_kinds``.

    ``pedestrian_options`` is a list of configurations, each a list of
    ``{"on": [lo, hi], "started_crossing": bool}`` objects.
    """
    try:
        data = _fractions_to_str(json.loads(text, parse_float=Fraction))
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SnapshotError("universe file must hold a JSON object")
    unknown = set(data) - _UNIVERSE_KEYS
    if unknown:
        raise SnapshotError(f"unknown universe keys: {', '.join(sorted(unknown))}")
    try:
        kw = dict(data)
        for k in ("extent", "crossing", "ego_reservation", "ego_claim"):
            if kw.get(k) is not None:
                kw[k] = _iv(kw[k])
        for k in ("position_grid_step", "ego_size", "sign_position", "perception_distance", "approach_distance"):
            if kw.get(k) is not None:
                kw[k] = rational(kw[k])
        kw["car_sizes"] = tuple(rational(x) for x in kw.get("car_sizes", ()))
        if "pedestrian_options" in kw:
            kw["pedestrian_options"] = tuple(
                tuple(Pedestrian(_iv(p["on"]), bool(p["started_crossing"])) for p in opt)
                for opt in kw["pedestrian_options"]
            )
        kw.setdefault("sign_kinds", tuple(default_sign_kinds))
        return UniverseParams(**kw)
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"invalid universe: {exc}") from None
