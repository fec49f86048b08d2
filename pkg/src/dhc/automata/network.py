"""Forward symbolic reachability for one rule automaton or an interleaved network of them.

The environment is a finite list of scenario snapshots, any of which may be
current at any moment. A snapshot is admissible in a location tuple when it
satisfies every component's spatial invariant. An edge fires under snapshot
``i`` when ``i`` is admissible before and after the edge, satisfies the
spatial guard, and the clock part leaves a nonempty zone. Spatial truth is
tabulated once per (formula, snapshot) as a bit mask over scenarios.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from ..logic.evaluate import Evaluator
from ..logic.formula import Formula, TrueF, intern_formula
from ..spatial import TrafficSnapshot, validate_snapshot
from .model import RuleAutomaton, Transition, validate_automaton
from .zone import Zone, zone_and, zone_extrapolate, zone_reset, zone_up


class ReplayError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Edge:
    component: int
    index: int
    transition: Transition
    source: int
    target: int
    guard: tuple
    resets: tuple[str, ...]

    @property
    def action(self) -> str:
        return self.transition.action


class Network:
    """Interleaving product of rule automata with disjoint (prefixed) clocks.

    With a single automaton and ``prefix=False`` clock names are kept as is.
    """

    def __init__(self, automata: Sequence[RuleAutomaton], prefix: Optional[bool] = None):
        automata = list(automata)
        if not automata:
            raise ValueError("need at least one automaton")
        names = [a.name for a in automata]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate rule names: {', '.join(sorted(dup))}")
        for a in automata:
            problems = validate_automaton(a)
            if problems:
                raise ValueError(f"rule {a.name!r} is invalid: {problems[0]}")
        if prefix is None:
            prefix = len(automata) > 1
        self.automata = automata
        self.prefix = prefix
        self.clocks: list[str] = []
        self.loc_names: list[list[str]] = []
        self.invariants: list[list[tuple]] = []
        self.spatial_invariants: list[list[Optional[Formula]]] = []
        self.forbid: list[list[frozenset]] = []
        self.edges: list[list[list[Edge]]] = []  # component -> source location -> edges
        self.max_constant = 0
        for k, a in enumerate(automata):
            rename = {c: (f"{a.name}.{c}" if prefix else c) for c in a.clocks}
            self.clocks.extend(rename[c] for c in a.clocks)
            consts = a.constant_table
            locs = list(a.location_names)
            index = {n: i for i, n in enumerate(locs)}
            self.loc_names.append(locs)
            self.invariants.append(
                [tuple((rename[c], op, b) for c, op, b in loc.invariant.resolve(consts)) for loc in a.locations]
            )
            self.spatial_invariants.append([loc.spatial_invariant for loc in a.locations])
            self.forbid.append([frozenset(loc.forbid) for loc in a.locations])
            by_src: list[list[Edge]] = [[] for _ in locs]
            for ti, t in enumerate(a.transitions):
                guard = tuple((rename[c], op, b) for c, op, b in t.clock_guard.resolve(consts))
                e = Edge(k, ti, t, index[t.source], index[t.target], guard, tuple(rename[c] for c in t.resets))
                by_src[e.source].append(e)
            self.edges.append(by_src)
            self.max_constant = max(self.max_constant, a.max_constant())
        self.initial = tuple(a.location_names.index(a.initial.name) for a in automata)

    @property
    def size(self) -> int:
        return len(self.automata)

    def names(self, locs: tuple[int, ...]) -> tuple[str, ...]:
        return tuple(self.loc_names[k][i] for k, i in enumerate(locs))

    def indices(self, names: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.loc_names[k].index(n) for k, n in enumerate(names))

    def invariant(self, locs: tuple[int, ...]) -> tuple:
        out = ()
        for k, i in enumerate(locs):
            out += self.invariants[k][i]
        return out

    def outgoing(self, locs: tuple[int, ...]):
        for k, i in enumerate(locs):
            for e in self.edges[k][i]:
                yield e, locs[:k] + (e.target,) + locs[k + 1:]

    def initial_zone(self) -> Zone:
        inv = self.invariant(self.initial)
        z = zone_and(Zone.zero(self.clocks), inv)
        return zone_up(z, inv)

    def fire(self, zone: Zone, edge: Edge, new_locs: tuple[int, ...]) -> Zone:
        """Successor zone of ``edge`` (guard, reset, target invariant, time elapse)."""
        z = zone_and(zone, edge.guard)
        if z.empty:
            return z
        z = zone_reset(z, edge.resets)
        inv = self.invariant(new_locs)
        z = zone_and(z, inv)
        if z.empty:
            return z
        return zone_up(z, inv)


def _true_mask(n: int) -> int:
    return (1 << n) - 1


class SpatialTable:
    """Truth of every spatial guard and invariant on every scenario, as bit masks.

    ``share`` is an earlier table over the same scenarios whose formula
    results are reused.
    """

    def __init__(self, network: Network, scenarios: Sequence[TrafficSnapshot],
                 share: Optional["SpatialTable"] = None):
        self.scenarios = list(scenarios)
        self.all = _true_mask(len(scenarios))
        if share is not None and share.scenarios == self.scenarios:
            self._evaluators, self._cache, self._pool = share._evaluators, share._cache, share._pool
        else:
            for i, s in enumerate(scenarios):
                problems = validate_snapshot(s)
                if problems:
                    raise ValueError(f"scenario {i} is invalid: {problems[0]}")
            self._evaluators = [Evaluator(s) for s in scenarios]
            self._cache: dict = {}
            self._pool: dict = {}
        self.loc_masks = [
            [self.mask(f) for f in comp] for comp in network.spatial_invariants
        ]
        self.edge_masks = {}
        for comp in network.edges:
            for edges in comp:
                for e in edges:
                    self.edge_masks[e] = self.mask(e.transition.spatial_guard)

    def mask(self, f: Optional[Formula]) -> int:
        if f is None or isinstance(f, TrueF):
            return self.all
        f = intern_formula(f, self._pool)
        m = self._cache.get(id(f))
        if m is None:
            m = 0
            for i, (s, ev) in enumerate(zip(self.scenarios, self._evaluators)):
                if ev.check(f):
                    m |= 1 << i
            self._cache[id(f)] = m
        return m

    def admissible(self, locs: tuple[int, ...]) -> int:
        m = self.all
        for k, i in enumerate(locs):
            m &= self.loc_masks[k][i]
        return m


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class TraceStep:
    kind: str  # "delay" or "action"
    locations: tuple[str, ...]  # after the step
    snapshot: Optional[int] = None
    component: Optional[str] = None
    transition: Optional[int] = None
    action: Optional[str] = None
    source: Optional[str] = None
    target: Optional[str] = None

    def to_json(self) -> dict:
        d = {"kind": self.kind, "locations": list(self.locations)}
        if self.kind == "action":
            d.update(
                rule=self.component, transition=self.transition, action=self.action,
                source=self.source, target=self.target, snapshot=self.snapshot,
            )
        return d

    def __str__(self):
        if self.kind == "delay":
            return f"delay        -> ({', '.join(self.locations)})"
        return (f"{self.component}: {self.source} -{self.action}-> {self.target} "
                f"[snapshot {self.snapshot}] -> ({', '.join(self.locations)})")


@dataclass(frozen=True)
class SymbolicState:
    locations: tuple[str, ...]
    zone: Zone
    snapshot: Optional[int] = None

    @property
    def location(self) -> Union[str, tuple[str, ...]]:
        return self.locations[0] if len(self.locations) == 1 else self.locations


@dataclass
class _Node:
    locs: tuple[int, ...]
    zone: Zone
    parent: Optional[int]
    edge: Optional[Edge]
    snapshot: Optional[int]
    alive: bool = True


@dataclass
class ReachResult:
    network: Network
    scenarios: list
    table: SpatialTable
    nodes: list = field(repr=False)
    zones: dict = field(default_factory=dict)  # location-name tuple -> list of maximal zones
    first: dict = field(default_factory=dict)  # location-name tuple -> node id of first visit

    @property
    def locations(self) -> set:
        """Reachable location tuples (plain names for a single automaton)."""
        if self.network.size == 1:
            return {t[0] for t in self.zones}
        return set(self.zones)

    def reachable(self, loc) -> bool:
        key = (loc,) if isinstance(loc, str) else tuple(loc)
        return key in self.zones

    def trace_to_node(self, nid: int) -> list[TraceStep]:
        chain = []
        while nid is not None:
            chain.append(self.nodes[nid])
            nid = self.nodes[nid].parent
        chain.reverse()
        net = self.network
        steps = []
        for node in chain:
            names = net.names(node.locs)
            if node.edge is not None:
                e = node.edge
                steps.append(TraceStep(
                    "action", names, node.snapshot, net.automata[e.component].name, e.index,
                    e.action, net.loc_names[e.component][e.source], net.loc_names[e.component][e.target],
                ))
            steps.append(TraceStep("delay", names))
        return steps

    def trace(self, loc) -> Optional[list[TraceStep]]:
        """Shortest (in actions) witness trace to ``loc``, or None if unreachable."""
        key = (loc,) if isinstance(loc, str) else tuple(loc)
        nid = self.first.get(key)
        return None if nid is None else self.trace_to_node(nid)

    def states(self):
        """Yield ``(node id, location indices, zone)`` for every stored maximal zone."""
        for nid, node in enumerate(self.nodes):
            if node.alive:
                yield nid, node.locs, node.zone


def explore(network: Network, scenarios: Sequence[TrafficSnapshot], table: Optional[SpatialTable] = None) -> ReachResult:
    if not scenarios:
        raise ValueError("need at least one scenario snapshot")
    table = table or SpatialTable(network, scenarios)
    M = network.max_constant
    res = ReachResult(network, list(scenarios), table, [])
    nodes = res.nodes
    passed: dict[tuple, list[int]] = {}
    queue: deque[int] = deque()

    def add(locs, zone, parent, edge, snap):
        zone = zone_extrapolate(zone, M)
        if zone.empty:
            return
        bucket = passed.setdefault(locs, [])
        for nid in bucket:
            if zone <= nodes[nid].zone:
                return
        keep = []
        for nid in bucket:
            if nodes[nid].zone <= zone:
                nodes[nid].alive = False
            else:
                keep.append(nid)
        nid = len(nodes)
        nodes.append(_Node(locs, zone, parent, edge, snap))
        keep.append(nid)
        passed[locs] = keep
        res.first.setdefault(network.names(locs), nid)
        queue.append(nid)

    if table.admissible(network.initial):
        add(network.initial, network.initial_zone(), None, None, None)
    while queue:
        nid = queue.popleft()
        node = nodes[nid]
        if not node.alive:
            continue
        here = table.admissible(node.locs)
        for edge, new_locs in network.outgoing(node.locs):
            mask = here & table.edge_masks[edge]
            if mask:
                mask &= table.admissible(new_locs)
            if not mask:
                continue
            z = network.fire(node.zone, edge, new_locs)
            if not z.empty:
                add(new_locs, z, nid, edge, lowest_bit(mask))
    for locs, ids in passed.items():
        res.zones[network.names(locs)] = [nodes[i].zone for i in ids]
    return res


def _as_network(a) -> Network:
    if isinstance(a, Network):
        return a
    return Network([a], prefix=False)


def reach(a: Union[RuleAutomaton, Network], scenarios: Sequence[TrafficSnapshot]) -> ReachResult:
    """Symbolic forward reachability of ``a`` under nondeterministic scenarios."""
    return explore(_as_network(a), scenarios)


def initial_state(a: Union[RuleAutomaton, Network]) -> SymbolicState:
    net = _as_network(a)
    return SymbolicState(net.names(net.initial), net.initial_zone())


def enabled(a: Union[RuleAutomaton, Network], st: SymbolicState, s: TrafficSnapshot) -> list[Transition]:
    """Transitions able to fire from ``st`` while ``s`` is the current snapshot."""
    problems = validate_snapshot(s)
    if problems:
        raise ValueError(f"invalid snapshot: {problems[0]}")
    return [e.transition for e, _, _ in _enabled_edges(_as_network(a), st, s)]


def _enabled_edges(net: Network, st: SymbolicState, s: TrafficSnapshot):
    if st.zone.empty:
        return []
    ev = Evaluator(s)

    def holds(f):
        return f is None or ev.check(f)

    def admissible(locs):
        return all(holds(net.spatial_invariants[k][i]) for k, i in enumerate(locs))

    locs = net.indices(st.locations)
    if not admissible(locs):
        return []
    out = []
    for e, new_locs in net.outgoing(locs):
        if not holds(e.transition.spatial_guard) or not admissible(new_locs):
            continue
        z = net.fire(st.zone, e, new_locs)
        if not z.empty:
            out.append((e, new_locs, z))
    return out


def replay(a: Union[RuleAutomaton, Network], scenarios: Sequence[TrafficSnapshot], trace: Sequence[TraceStep]) -> SymbolicState:
    """Re-execute ``trace`` with exact (non-extrapolated) zones.

    Raises :class:`ReplayError` when a step is not enabled or does not land
    where the trace claims.
    """
    net = _as_network(a)
    st = initial_state(net)
    if st.zone.empty:
        raise ReplayError("initial state is empty")
    for n, step in enumerate(trace):
        if step.kind == "delay":
            if tuple(step.locations) != st.locations:
                raise ReplayError(f"step {n}: delay claims {step.locations}, at {st.locations}")
            continue
        s = scenarios[step.snapshot]
        for e, new_locs, z in _enabled_edges(net, st, s):
            if net.automata[e.component].name == step.component and e.index == step.transition:
                st = SymbolicState(net.names(new_locs), z, step.snapshot)
                break
        else:
            raise ReplayError(f"step {n}: {step.component} transition {step.transition} not enabled")
        if tuple(step.locations) != st.locations:
            raise ReplayError(f"step {n}: lands in {st.locations}, trace says {step.locations}")
    return st
