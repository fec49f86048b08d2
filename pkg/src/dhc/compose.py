"""Parallel composition of rule automata and conflict detection.

Components interleave and share only the environment snapshot. Two notions
of conflict are checked on reachable composed states:

* permission conflict: one component can take action ``a`` while another
  component's current location forbids ``a``;
* timelock: time cannot pass (an invariant upper bound is reached) and no
  component can move under any admissible snapshot.

A static scan additionally flags location pairs that are reached together
although their spatial invariants can never hold at once.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .automata.discrete import DiscreteSystem
from .automata.model import RuleAutomaton
from .automata.network import (
    Network, ReachResult, SpatialTable, SymbolicState, TraceStep, explore, lowest_bit,
)
from .automata.zone import Zone, zone_and, zone_integer_part, zone_subtract
from .dsl import snapshot_to_json
from .logic.formula import And
from .logic.search import satisfiable_in_universe
from .spatial import TrafficSnapshot, UniverseParams, enumerate_universe

ComposedSystem = Network


def compose(rules: Sequence[RuleAutomaton]) -> ComposedSystem:
    """Interleaving product; each rule's clocks are prefixed with its name."""
    rules = list(rules)
    if len(rules) < 2:
        raise ValueError("composition needs at least two rules")
    return Network(rules, prefix=True)


def as_scenarios(universe: Union[UniverseParams, Iterable[TrafficSnapshot]]) -> list[TrafficSnapshot]:
    if isinstance(universe, UniverseParams):
        return list(enumerate_universe(universe))
    return list(universe)


@dataclass
class ConflictReport:
    kind: str  # "PermissionConflict" or "Timelock"
    locations: tuple[str, ...]
    rules: tuple[str, ...]
    zone: Zone
    snapshots: list[TrafficSnapshot]
    snapshot_index: Optional[int]
    trace: list[TraceStep]
    action: Optional[str] = None
    enabling: list[str] = field(default_factory=list)
    forbidding: list[str] = field(default_factory=list)
    valuation: Optional[dict] = None

    @property
    def state(self) -> SymbolicState:
        return SymbolicState(self.locations, self.zone, self.snapshot_index)

    def to_json(self) -> dict:
        d = {
            "kind": self.kind,
            "action": self.action,
            "locations": dict(zip(self.rules, self.locations)),
            "zone": str(self.zone),
            "snapshot_index": self.snapshot_index,
            "snapshot": snapshot_to_json(self.snapshots[0]) if self.snapshots else None,
            "trace": [t.to_json() for t in self.trace],
        }
        if self.kind == "PermissionConflict":
            d["enabling_rules"] = self.enabling
            d["forbidding_rules"] = self.forbidding
        if self.valuation is not None:
            d["valuation"] = self.valuation
        return d

    def __str__(self):
        locs = ", ".join(f"{r}={l}" for r, l in zip(self.rules, self.locations))
        if self.kind == "PermissionConflict":
            head = (f"permission conflict on '{self.action}' at ({locs}): "
                    f"enabled by {', '.join(self.enabling)}, forbidden by {', '.join(self.forbidding)}")
        else:
            head = f"timelock at ({locs}) with {self.valuation}"
        lines = [head, f"  witness snapshot #{self.snapshot_index}", "  trace:"]
        lines += [f"    {t}" for t in self.trace]
        return "\n".join(lines)


def _reach(system: Network, scenarios, result: Optional[ReachResult]) -> ReachResult:
    return result if result is not None else explore(system, list(scenarios))


# -- permission conflicts ----------------------------------------------------

def find_permission_conflicts(
    system: ComposedSystem, scenarios: Sequence[TrafficSnapshot], result: Optional[ReachResult] = None,
) -> list[ConflictReport]:
    """One report per (location tuple, action), with the shortest witness found first."""
    res = _reach(system, scenarios, result)
    table = res.table
    names = [a.name for a in system.automata]
    found: dict[tuple, ConflictReport] = {}
    for nid, node in enumerate(res.nodes):
        locs = node.locs
        here = table.admissible(locs)
        if not here:
            continue
        for e, new_locs in system.outgoing(locs):
            forbidding = [
                names[j] for j, i in enumerate(locs) if j != e.component and e.action in system.forbid[j][i]
            ]
            if not forbidding:
                continue
            mask = here & table.edge_masks[e] & table.admissible(new_locs)
            if not mask or system.fire(node.zone, e, new_locs).empty:
                continue
            key = (locs, e.action)
            rep = found.get(key)
            if rep is None:
                snap = lowest_bit(mask)
                found[key] = ConflictReport(
                    kind="PermissionConflict", locations=system.names(locs), rules=tuple(names),
                    zone=node.zone, snapshots=[res.scenarios[snap]], snapshot_index=snap,
                    trace=res.trace_to_node(nid), action=e.action,
                    enabling=[names[e.component]], forbidding=forbidding,
                )
            elif names[e.component] not in rep.enabling and rep.zone == node.zone:
                rep.enabling.append(names[e.component])
                rep.forbidding += [n for n in forbidding if n not in rep.forbidding]
    return list(found.values())


def permission_conflicts_discrete(
    system: ComposedSystem, scenarios: Sequence[TrafficSnapshot], table: Optional[SpatialTable] = None,
) -> set:
    """``{(location names, action)}`` by exhaustive integer-time search."""
    ds = DiscreteSystem(system, scenarios, table)
    out = set()
    for locs, vals in ds.explore().states:
        for e, _, _, _ in ds.firings(locs, vals):
            if any(j != e.component and e.action in system.forbid[j][i] for j, i in enumerate(locs)):
                out.add((system.names(locs), e.action))
    return out


# -- timelocks ---------------------------------------------------------------

def _firing_region(system: Network, e, new_locs) -> Optional[tuple]:
    """Clock constraint under which ``e`` fires from a valuation, or None if never."""
    atoms = list(e.guard)
    reset = set(e.resets)
    for clock, op, c in system.invariant(new_locs):
        if clock in reset:
            if op == ">=" and c > 0:
                return None
        else:
            atoms.append((clock, op, c))
    return tuple(atoms)


def _corner(z: Zone) -> dict:
    # minimal valuation; lies in any canonical DBM
    return {c: -(z.bounds[z.index(c)] >> 1) for c in z.clocks}


def find_timelocks(
    system: Network, scenarios: Sequence[TrafficSnapshot], result: Optional[ReachResult] = None,
) -> list[ConflictReport]:
    """Reachable states that can neither delay nor move, one report per location tuple.

    Witnesses are integer valuations: time is blocked when some invariant
    ``x <= u`` has ``x = u``, and no edge fires under any admissible snapshot.
    """
    res = _reach(system, scenarios, result)
    table = res.table
    names = tuple(a.name for a in system.automata)
    found: dict[tuple, ConflictReport] = {}
    for nid, node in enumerate(res.nodes):
        locs = node.locs
        if locs in found:
            continue
        here = table.admissible(locs)
        uppers = [(c, b) for c, op, b in system.invariant(locs) if op == "<="]
        if not uppers or not here:
            continue
        regions = []
        for e, new_locs in system.outgoing(locs):
            if here & table.edge_masks[e] & table.admissible(new_locs):
                r = _firing_region(system, e, new_locs)
                if r is not None:
                    regions.append(r)
        witness = None
        for clock, bound in uppers:
            pieces = [zone_and(node.zone, [(clock, ">=", bound)])]
            pieces = [p for p in pieces if not p.empty]
            for r in regions:
                pieces = [q for p in pieces for q in zone_subtract(p, r)]
                if not pieces:
                    break
            for p in pieces:
                ip = zone_integer_part(p)
                if not ip.empty:
                    witness = ip
                    break
            if witness is not None:
                break
        if witness is None:
            continue
        snap = lowest_bit(here)
        found[locs] = ConflictReport(
            kind="Timelock", locations=system.names(locs), rules=names, zone=node.zone,
            snapshots=[res.scenarios[snap]], snapshot_index=snap, trace=res.trace_to_node(nid),
            valuation=_corner(witness),
        )
    return list(found.values())


def timelocks_discrete(
    system: Network, scenarios: Sequence[TrafficSnapshot], table: Optional[SpatialTable] = None,
) -> set:
    """Location tuples holding a stuck integer state, by exhaustive search."""
    ds = DiscreteSystem(system, scenarios, table)
    out = set()
    for locs, vals in ds.explore().states:
        if ds.can_delay(locs, vals) is None and next(ds.firings(locs, vals), None) is None:
            out.add(system.names(locs))
    return out


# -- static invariant scan ---------------------------------------------------

@dataclass(frozen=True)
class Contradiction:
    rule_a: str
    location_a: str
    rule_b: str
    location_b: str
    explanation: str
    trace: tuple = ()

    def to_json(self) -> dict:
        return {
            "kind": "GuardContradiction",
            "locations": {self.rule_a: self.location_a, self.rule_b: self.location_b},
            "explanation": self.explanation,
            "trace": [t.to_json() for t in self.trace],
        }

    def __str__(self):
        return f"{self.rule_a}.{self.location_a} with {self.rule_b}.{self.location_b}: {self.explanation}"


def _relaxed(a: RuleAutomaton) -> RuleAutomaton:
    return dataclasses.replace(a, locations=tuple(dataclasses.replace(l, spatial_invariant=None) for l in a.locations))


def guard_contradiction_scan(
    rules: Sequence[RuleAutomaton], universe: Union[UniverseParams, Iterable[TrafficSnapshot]],
    share: Optional[SpatialTable] = None,
) -> list[Contradiction]:
    """Location pairs reached together whose spatial invariants no universe snapshot satisfies.

    Joint reachability is computed with spatial invariants dropped, since
    with them in place such pairs are unreachable by construction.
    ``share`` lets the scan reuse guard results from an earlier exploration.
    """
    rules = list(rules)
    snaps = as_scenarios(universe)
    net = Network([_relaxed(a) for a in rules], prefix=len(rules) > 1)
    res = explore(net, snaps, SpatialTable(net, snaps, share))
    checked: dict = {}
    out = []
    for names_tuple, nid in res.first.items():
        locs = net.indices(names_tuple)
        for i in range(len(rules)):
            fa = rules[i].location(names_tuple[i]).spatial_invariant
            if fa is None:
                continue
            for j in range(i + 1, len(rules)):
                fb = rules[j].location(names_tuple[j]).spatial_invariant
                if fb is None:
                    continue
                key = (i, locs[i], j, locs[j])
                if key in checked:
                    continue
                checked[key] = satisfiable_in_universe(And(fa, fb), snaps)
                if checked[key] is None:
                    out.append(Contradiction(
                        rules[i].name, names_tuple[i], rules[j].name, names_tuple[j],
                        f"'{fa}' and '{fb}' hold together on no snapshot of the universe ({len(snaps)} checked)",
                        tuple(res.trace_to_node(nid)),
                    ))
    return out


def sign_kinds(rules: Iterable[RuleAutomaton]) -> tuple[str, ...]:
    """Sign kinds observed anywhere in ``rules``, in first-use order."""
    from .logic.formula import Ob, walk

    kinds: list[str] = []
    for a in rules:
        fs = [l.spatial_invariant for l in a.locations if l.spatial_invariant is not None]
        fs += [t.spatial_guard for t in a.transitions]
        for f in fs:
            for g in walk(f):
                if isinstance(g, Ob) and g.kind not in kinds:
                    kinds.append(g.kind)
    return tuple(kinds)
