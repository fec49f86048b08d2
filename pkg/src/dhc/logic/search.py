from __future__ import annotations

from typing import Callable, Iterable, Optional, Union

from ..spatial import Interval, TrafficSnapshot, UniverseParams, enumerate_universe
from . import formula as F
from .evaluate import evaluate


def full_extent(s: TrafficSnapshot) -> Interval:
    return s.extent


def satisfiable_in_universe(
    f: F.Formula,
    universe: Union[UniverseParams, Iterable[TrafficSnapshot]],
    view_policy: Callable[[TrafficSnapshot], Interval] = full_extent,
) -> Optional[tuple[TrafficSnapshot, Interval]]:
    """First ``(snapshot, view)`` in enumeration order on which ``f`` holds, else None.

    ``universe`` is either a parameter set to enumerate or an explicit
    sequence of snapshots.
    """
    if isinstance(f, F.FalseF):
        return None
    snaps = enumerate_universe(universe) if isinstance(universe, UniverseParams) else universe
    for s in snaps:
        v = view_policy(s)
        if evaluate(f, s, v):
            return s, v
    return None
