"""BDI plan sketches: ``trigger : guard, ... <- action;`` per transition.

The first conjunct of a spatial guard becomes the triggering event and the
rest become context guards. Atoms map to event names through a fixed table;
negated atoms keep a ``~`` prefix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..automata.model import RuleAutomaton
from ..logic import formula as F
from ..logic.printer import pretty


@dataclass(frozen=True)
class PlanLine:
    trigger: str
    guards: tuple[str, ...]
    actions: tuple[str, ...]

    def __str__(self):
        head = f"{self.trigger} : {', '.join(self.guards)}" if self.guards else self.trigger
        return f"{head} <- {', '.join(self.actions)};"


@dataclass
class PlanSketch:
    lines: list[PlanLine] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __str__(self):
        return "".join(f"{line}\n" for line in self.lines)


def _camel(text: str) -> str:
    words = [w for w in re.split(r"[^A-Za-z0-9]+", text) if w]
    if not words:
        return "act"
    return words[0].lower() + "".join(w[:1].upper() + w[1:].lower() for w in words[1:])


def _slug(text: str) -> str:
    return re.sub(r"-+", "-", re.sub(r"[^A-Za-z0-9]+", "-", text)).strip("-").lower()


def _chain(f) -> list:
    if isinstance(f, F.Somewhere):
        f = f.arg
    parts = []
    while isinstance(f, F.Chop):
        parts.append(f.left)
        f = f.right
    return parts + [f]


def _is_safe_gap(f) -> bool:
    parts = _chain(f)
    if len(parts) != 3:
        return False
    a, b, c = (set(map(type, F.conjuncts(p))) for p in parts)
    return F.Re in a and F.Free in b and F.Sg in c and F.Cs in c


def _is_approach(f) -> bool:
    parts = _chain(f)
    if len(parts) != 3:
        return False
    mid = F.conjuncts(parts[1])
    return (isinstance(parts[0], F.Re) and isinstance(parts[2], F.Cs)
            and any(isinstance(m, F.Not) and isinstance(m.arg, F.LengthGE) for m in mid))


def _atom_name(f):
    """Event name of a positive literal, or None if ``f`` is not one."""
    if isinstance(f, F.Exists) and isinstance(f.body, F.Pc):
        return "potential-collision"
    if isinstance(f, F.Pc):
        return "potential-collision" if isinstance(f.car, F.Var) else f"potential-collision-{f.car.name}"
    if isinstance(f, F.Pa):
        return "pedestrian-ahead"
    if isinstance(f, F.Ob):
        return f"observed-{f.kind}"
    if isinstance(f, (F.Somewhere, F.Chop)):
        if _is_safe_gap(f):
            return "safe-gap-on-junction"
        if _is_approach(f):
            return "at-junction"
        return None
    if isinstance(f, F.Free):
        return "free"
    if isinstance(f, F.Cs):
        return "on-crossing"
    return None


def _literal(f):
    neg = False
    while isinstance(f, F.Not):
        f = f.arg
        neg = not neg
    name = _atom_name(f)
    if name is None:
        return None
    return ("~" if neg else "") + name


def to_bdi_sketch(a: RuleAutomaton) -> PlanSketch:
    sketch = PlanSketch()
    for t in a.transitions:
        target = a.location(t.target)
        action = _camel(target.role) if target.role else _camel(t.action)
        g = t.spatial_guard
        if isinstance(g, F.TrueF):
            sketch.lines.append(PlanLine("start", (), (action,)))
            continue
        lits = [_literal(c) for c in F.conjuncts(g)]
        if any(l is None for l in lits):
            trigger = _slug(pretty(g))
            sketch.warnings.append(
                f"{t.source} -> {t.target} ({t.action}): guard is not a conjunction of known atoms; "
                f"emitted as composite trigger {trigger!r}"
            )
            sketch.lines.append(PlanLine(trigger, (), (action,)))
            continue
        sketch.lines.append(PlanLine(lits[0], tuple(lits[1:]), (action,)))
    return sketch
