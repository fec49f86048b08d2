"""UPPAAL XTA emission.

Clock constraints are emitted natively. Spatial formulas have no XTA
counterpart and are lowered in one of two modes:

``bool-env``
    one boolean per distinct spatial formula (a formula and its negation
    share a variable), driven by an ``Env`` process that may flip any of
    them at any time;
``comment``
    the spatial part becomes ``true`` and the formula survives as a comment.

Either way the exported model over-approximates the original.
"""

from __future__ import annotations

import re

from ..automata.model import ClockConstraint, RuleAutomaton, validate_automaton
from ..logic.formula import Formula, Not, TrueF
from ..logic.printer import pretty

MODES = ("bool-env", "comment")

XTA_KEYWORDS = {
    "clock", "bool", "int", "const", "chan", "urgent", "broadcast", "process", "state", "init",
    "trans", "guard", "sync", "assign", "system", "commit", "committed", "true", "false",
    "select", "void", "return", "if", "else", "for", "while", "do", "and", "or", "not",
    "imply", "forall", "exists", "typedef", "struct", "meta", "scalar", "priority", "Env",
}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class XtaExportError(ValueError):
    pass


def _ident(name: str, what: str) -> str:
    if not _IDENT.match(name) or name in XTA_KEYWORDS:
        raise XtaExportError(f"{what} {name!r} is not a valid XTA identifier")
    return name


def _process_name(a: RuleAutomaton) -> str:
    return "Rule_" + re.sub(r"[^A-Za-z0-9_]", "_", a.name)


def _cc(cc: ClockConstraint) -> list[str]:
    return [f"{atom.clock} {atom.op} {atom.bound}" for atom in cc]


def _core(f: Formula) -> tuple[Formula, bool]:
    positive = True
    while isinstance(f, Not):
        f = f.arg
        positive = not positive
    return f, positive


def _comment(text: str) -> str:
    return text.replace("*/", "* /")


def spatial_variables(a: RuleAutomaton) -> dict[str, str]:
    """Formula text -> boolean name, one per distinct spatial formula up to negation."""
    out: dict[str, str] = {}
    formulas = [loc.spatial_invariant for loc in a.locations] + [t.spatial_guard for t in a.transitions]
    for f in formulas:
        if f is None or isinstance(f, TrueF):
            continue
        key = pretty(_core(f)[0])
        if key not in out:
            out[key] = f"env_{len(out)}"
    return out


def to_xta(a: RuleAutomaton, mode: str = "bool-env") -> str:
    if mode not in MODES:
        raise XtaExportError(f"unknown spatial lowering mode {mode!r} (expected one of {', '.join(MODES)})")
    problems = validate_automaton(a)
    if problems:
        raise XtaExportError(f"automaton is invalid: {problems[0]}")
    for c in a.clocks:
        _ident(c, "clock")
    for loc in a.locations:
        _ident(loc.name, "location")
    consts = a.constant_table
    int_consts = []
    for name, val in a.constants:
        _ident(name, "constant")
        if val.denominator == 1:
            int_consts.append((name, int(val)))

    envs = spatial_variables(a) if mode == "bool-env" else {}

    def lower(f):
        if f is None or isinstance(f, TrueF):
            return [], None
        core, positive = _core(f)
        text = pretty(f)
        if mode == "comment":
            return [], text
        var = envs[pretty(core)]
        return [var if positive else f"!{var}"], text

    proc = _process_name(a)
    out = [
        f"// rule {a.name}",
        f"// spatial lowering: {mode}",
        "// Spatial formulas are abstracted, so reachability in this model",
        "// over-approximates reachability of the rule automaton.",
    ]
    for n in a.notes:
        out.append(f"// note: {n}")
    for name, val in a.constants:
        if val.denominator != 1:
            out.append(f"// constant {name} = {val} (not an integer, unused by clocks)")
    out.append("")
    if envs:
        out.append("// environment booleans:")
        for text, var in envs.items():
            out.append(f"//   {var} <=> {text}")
        out.append("bool " + ", ".join(f"{v} = false" for v in envs.values()) + ";")
        out.append("")

    out.append(f"process {proc}() {{")
    for name, val in int_consts:
        out.append(f"    const int {name} = {val};")
    if a.clocks:
        out.append(f"    clock {', '.join(a.clocks)};")
    states = []
    for loc in a.locations:
        parts = _cc(loc.invariant)
        extra, text = lower(loc.spatial_invariant)
        parts += extra
        decl = loc.name + (f" {{ {' && '.join(parts)} }}" if parts else "")
        if text is not None:
            decl += f" /* spatial invariant: {_comment(text)} */"
        states.append(decl)
    out.append("    state")
    out.append(",\n".join(f"        {s}" for s in states) + ";")
    out.append(f"    init {a.initial.name};")
    if a.transitions:
        edges = []
        for t in a.transitions:
            extra, text = lower(t.spatial_guard)
            guard = extra + _cc(t.clock_guard)
            body = []
            if guard:
                body.append(f"guard {' && '.join(guard)};")
            elif mode == "comment" and text is not None:
                body.append("guard true;")
            if t.resets:
                body.append(f"assign {', '.join(f'{c} := 0' for c in t.resets)};")
            lines = [f"        /* action: {t.action} */"]
            if text is not None:
                lines.append(f"        /* spatial guard: {_comment(text)} */")
            lines.append(f"        {t.source} -> {t.target} {{ {' '.join(body)} }}")
            edges.append("\n".join(lines))
        out.append("    trans")
        out.append(",\n".join(edges) + ";")
    out.append("}")
    out.append("")
    system = [proc]
    if envs:
        out.append("// environment: any boolean may change at any time")
        out.append("process Env() {")
        out.append("    state idle;")
        out.append("    init idle;")
        out.append("    trans")
        edges = []
        for var in envs.values():
            edges.append(f"        idle -> idle {{ assign {var} := true; }}")
            edges.append(f"        idle -> idle {{ assign {var} := false; }}")
        out.append(",\n".join(edges) + ";")
        out.append("}")
        out.append("")
        system.append("Env")
    out.append(f"system {', '.join(system)};")
    return "\n".join(out) + "\n"
