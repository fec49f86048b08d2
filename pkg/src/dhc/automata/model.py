"""Timed automata whose guards and invariants mix clock constraints with spatial formulas."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

from ..logic.formula import Formula, TrueF, free_variables

Bound = Union[int, str]  # literal or named constant


@dataclass(frozen=True)
class ClockAtom:
    clock: str
    op: str  # "<=" or ">="
    bound: Bound

    def __str__(self):
        return f"{self.clock} {self.op} {self.bound}"


@dataclass(frozen=True)
class ClockConstraint:
    atoms: tuple[ClockAtom, ...] = ()

    def __iter__(self):
        return iter(self.atoms)

    def __bool__(self):
        return bool(self.atoms)

    def __str__(self):
        return " and ".join(map(str, self.atoms)) if self.atoms else "true"

    def clocks(self) -> set[str]:
        return {a.clock for a in self.atoms}

    def resolve(self, constants: Mapping[str, Fraction]) -> tuple[tuple[str, str, int], ...]:
        out = []
        for a in self.atoms:
            b = a.bound
            if isinstance(b, str):
                b = constants[b]
            out.append((a.clock, a.op, int(b)))
        return tuple(out)


@dataclass(frozen=True)
class Location:
    name: str
    invariant: ClockConstraint = ClockConstraint()
    spatial_invariant: Optional[Formula] = None
    initial: bool = False
    forbid: tuple[str, ...] = ()
    role: Optional[str] = None


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    action: str
    spatial_guard: Formula = field(default_factory=TrueF)
    clock_guard: ClockConstraint = ClockConstraint()
    resets: tuple[str, ...] = ()

    def __str__(self):
        return f"{self.source} -{self.action}-> {self.target}"


@dataclass(frozen=True)
class RuleAutomaton:
    name: str
    clocks: tuple[str, ...]
    alphabet: tuple[str, ...]
    locations: tuple[Location, ...]
    transitions: tuple[Transition, ...]
    constants: tuple[tuple[str, Fraction], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def constant_table(self) -> dict[str, Fraction]:
        return dict(self.constants)

    @property
    def initial(self) -> Location:
        return next(loc for loc in self.locations if loc.initial)

    def location(self, name: str) -> Location:
        for loc in self.locations:
            if loc.name == name:
                return loc
        raise KeyError(name)

    @property
    def location_names(self) -> tuple[str, ...]:
        return tuple(loc.name for loc in self.locations)

    def outgoing(self, name: str) -> list[Transition]:
        return [t for t in self.transitions if t.source == name]

    def max_constant(self) -> int:
        consts = self.constant_table
        m = 0
        ccs = [loc.invariant for loc in self.locations] + [t.clock_guard for t in self.transitions]
        for cc in ccs:
            for a in cc:
                b = consts.get(a.bound, 0) if isinstance(a.bound, str) else a.bound
                m = max(m, int(b))
        return m


def validate_automaton(a: RuleAutomaton) -> list[str]:
    """All invariant violations of ``a``; empty when well formed."""
    problems = []
    consts = a.constant_table
    names = [loc.name for loc in a.locations]
    seen = set()
    for n in names:
        if n in seen:
            problems.append(f"duplicate location {n!r}")
        seen.add(n)
    n_init = sum(loc.initial for loc in a.locations)
    if n_init != 1:
        problems.append(f"expected exactly one initial location, found {n_init}")
    if len(set(a.clocks)) != len(a.clocks):
        problems.append("duplicate clock declaration")

    def check_cc(cc: ClockConstraint, where: str):
        for atom in cc:
            if atom.clock not in a.clocks:
                problems.append(f"{where}: unknown clock {atom.clock!r}")
            if atom.op not in ("<=", ">="):
                problems.append(f"{where}: only closed comparisons are supported, got {atom.op!r}")
            b = atom.bound
            if isinstance(b, str):
                if b not in consts:
                    problems.append(f"{where}: unknown constant {b!r}")
                    continue
                b = consts[b]
            if Fraction(b).denominator != 1 or b < 0:
                problems.append(f"{where}: clock bound {atom.bound} must be a nonnegative integer")

    def check_formula(f: Optional[Formula], where: str):
        if f is None:
            return
        open_vars = free_variables(f)
        if open_vars:
            problems.append(f"{where}: open formula (unbound {', '.join(sorted(open_vars))})")

    for loc in a.locations:
        check_cc(loc.invariant, f"location {loc.name}")
        check_formula(loc.spatial_invariant, f"location {loc.name} spatial invariant")
        for act in loc.forbid:
            if act not in a.alphabet:
                problems.append(f"location {loc.name}: forbidden action {act!r} not in alphabet")
    for t in a.transitions:
        where = f"transition {t.source} -> {t.target}"
        for end in (t.source, t.target):
            if end not in seen:
                problems.append(f"{where}: undeclared location {end!r}")
        if t.action not in a.alphabet:
            problems.append(f"{where}: action {t.action!r} not in alphabet")
        check_cc(t.clock_guard, where)
        for c in t.resets:
            if c not in a.clocks:
                problems.append(f"{where}: reset of undeclared clock {c!r}")
        check_formula(t.spatial_guard, f"{where} guard")
    return problems
