"""Explicit-state exploration over integer clock valuations.

With only closed integer constraints, integer valuations with unit delays
reach exactly the locations dense time reaches, which makes this an
independent oracle for the zone explorer. Clock values above the largest
constant are indistinguishable and are capped at ``max_constant + 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from ..spatial import TrafficSnapshot
from .model import RuleAutomaton
from .network import Network, SpatialTable


def _sat(vals: dict, atoms) -> bool:
    for clock, op, c in atoms:
        v = vals[clock]
        if op == "<=" and v > c:
            return False
        if op == ">=" and v < c:
            return False
    return True


@dataclass
class DiscreteResult:
    network: Network
    states: dict = field(default_factory=dict)  # (locs, vals) -> depth
    complete: bool = False

    @property
    def locations(self) -> set:
        names = {self.network.names(locs) for locs, _ in self.states}
        if self.network.size == 1:
            return {n[0] for n in names}
        return names


class DiscreteSystem:
    def __init__(self, network: Network, scenarios: Sequence[TrafficSnapshot], table: Optional[SpatialTable] = None):
        self.net = network
        self.table = table or SpatialTable(network, scenarios)
        self.cap = network.max_constant + 1

    def valuation(self, vals: tuple) -> dict:
        return dict(zip(self.net.clocks, vals))

    def can_delay(self, locs, vals) -> Optional[tuple]:
        nxt = tuple(min(v + 1, self.cap) for v in vals)
        if _sat(self.valuation(nxt), self.net.invariant(locs)):
            return nxt
        return None

    def firings(self, locs, vals):
        """Yield ``(edge, new_locs, new_vals, snapshot_mask)`` for every edge that can fire."""
        here = self.table.admissible(locs)
        if not here:
            return
        val = self.valuation(vals)
        for e, new_locs in self.net.outgoing(locs):
            mask = here & self.table.edge_masks[e] & self.table.admissible(new_locs)
            if not mask or not _sat(val, e.guard):
                continue
            nv = dict(val)
            for c in e.resets:
                nv[c] = 0
            if not _sat(nv, self.net.invariant(new_locs)):
                continue
            yield e, new_locs, tuple(nv[c] for c in self.net.clocks), mask

    def initial(self):
        locs = self.net.initial
        vals = tuple(0 for _ in self.net.clocks)
        if not self.table.admissible(locs):
            return None
        if not _sat(self.valuation(vals), self.net.invariant(locs)):
            return None
        return locs, vals

    def explore(self, horizon: Optional[int] = None) -> DiscreteResult:
        res = DiscreteResult(self.net)
        init = self.initial()
        if init is None:
            res.complete = True
            return res
        res.states[init] = 0
        queue = deque([init])
        truncated = False
        while queue:
            st = queue.popleft()
            depth = res.states[st]
            if horizon is not None and depth >= horizon:
                truncated = True
                continue
            locs, vals = st
            succ = []
            d = self.can_delay(locs, vals)
            if d is not None:
                succ.append((locs, d))
            for _, nl, nv, _ in self.firings(locs, vals):
                succ.append((nl, nv))
            for s2 in succ:
                if s2 not in res.states:
                    res.states[s2] = depth + 1
                    queue.append(s2)
        res.complete = not truncated
        return res


def reach_discrete(
    a: Union[RuleAutomaton, Network],
    scenarios: Sequence[TrafficSnapshot],
    horizon: Optional[int] = None,
) -> DiscreteResult:
    """Breadth-first search over integer valuations, at most ``horizon`` steps deep.

    ``horizon=None`` runs to the fixpoint, which always exists because
    valuations are capped.
    """
    if horizon is not None and horizon < 0:
        raise ValueError("horizon must be >= 0")
    net = a if isinstance(a, Network) else Network([a], prefix=False)
    return DiscreteSystem(net, scenarios).explore(horizon)


