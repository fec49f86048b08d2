"""Graphviz DOT for a rule automaton or the static product of a composed system."""

from __future__ import annotations

import itertools
from typing import Union

from ..automata.model import RuleAutomaton, Transition
from ..automata.network import Network
from ..logic.formula import TrueF
from ..logic.printer import pretty


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def edge_label(t: Transition) -> str:
    lines = [t.action]
    if not isinstance(t.spatial_guard, TrueF):
        lines.append(pretty(t.spatial_guard))
    if t.clock_guard:
        lines.append(str(t.clock_guard))
    if t.resets:
        lines.append(", ".join(f"{c} := 0" for c in t.resets))
    return "\n".join(lines)


def _automaton(a: RuleAutomaton) -> str:
    out = [f"digraph {_q(a.name)} {{", "  rankdir=LR;", "  node [shape=ellipse];"]
    for loc in a.locations:
        label = [loc.name]
        if loc.role:
            label.append(loc.role)
        if loc.invariant:
            label.append(str(loc.invariant))
        if loc.spatial_invariant is not None:
            label.append(pretty(loc.spatial_invariant))
        attrs = [f"label={_q(chr(10).join(label))}"]
        if loc.initial:
            attrs.append("peripheries=2")
        out.append(f"  {_q(loc.name)} [{', '.join(attrs)}];")
    for t in a.transitions:
        out.append(f"  {_q(t.source)} -> {_q(t.target)} [label={_q(edge_label(t))}];")
    out.append("}")
    return "\n".join(out) + "\n"


def _product(net: Network) -> str:
    name = " || ".join(a.name for a in net.automata)
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    tuples = list(itertools.product(*[range(len(n)) for n in net.loc_names]))
    for locs in tuples:
        attrs = [f"label={_q('|'.join(net.names(locs)))}"]
        if locs == net.initial:
            attrs.append("peripheries=2")
        out.append(f"  {_q('|'.join(net.names(locs)))} [{', '.join(attrs)}];")
    for locs in tuples:
        src = "|".join(net.names(locs))
        for e, new_locs in net.outgoing(locs):
            label = f"{net.automata[e.component].name}: {edge_label(e.transition)}"
            out.append(f"  {_q(src)} -> {_q('|'.join(net.names(new_locs)))} [label={_q(label)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def to_dot(a: Union[RuleAutomaton, Network]) -> str:
    """One node per location (per location tuple for a composed system)."""
    if isinstance(a, Network):
        return _product(a)
    return _automaton(a)
