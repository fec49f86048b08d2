"""One-dimensional traffic snapshots along the ego vehicle's planned path.

Positions grow in the direction of travel. All coordinates are exact
:class:`fractions.Fraction` values; floats are never accepted silently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Tuple, Union

Number = Union[int, str, Fraction]


class SpatialDomainError(ValueError):
    """A view or position lies outside the snapshot extent."""


def rational(value) -> Fraction:
    """Parse ``value`` into an exact rational.

    Accepts ints, Fractions, and strings such as ``"7/2"`` or ``"3.25"``.
    Floats are rejected because their binary expansion is rarely what the
    author meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not positions")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not exact; use an int or 'p/q' string")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", rational(self.lo))
        object.__setattr__(self, "hi", rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def contains_point(self, p: Fraction) -> bool:
        return self.lo <= p <= self.hi

    def overlap(self, other: "Interval") -> Fraction:
        """Length of the intersection; zero when they merely touch or are disjoint."""
        return max(Fraction(0), min(self.hi, other.hi) - max(self.lo, other.lo))

    def meets(self, other: "Interval") -> bool:
        """Closed-set intersection test."""
        return max(self.lo, other.lo) <= min(self.hi, other.hi)

    def interior_meets(self, other: "Interval") -> bool:
        """True when ``other`` intersects the open interior of ``self``."""
        return max(self.lo, other.lo) < min(self.hi, other.hi)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class CarOccupancy:
    id: str
    reservation: Interval
    size: Fraction
    claim: Optional[Interval] = None

    def __post_init__(self):
        object.__setattr__(self, "size", rational(self.size))

    @property
    def footprint(self) -> Tuple[Interval, ...]:
        if self.claim is None:
            return (self.reservation,)
        return (self.reservation, self.claim)


@dataclass(frozen=True)
class Pedestrian:
    on: Interval
    started_crossing: bool = False


@dataclass(frozen=True)
class Sign:
    kind: str
    at: Fraction

    def __post_init__(self):
        object.__setattr__(self, "at", rational(self.at))


@dataclass(frozen=True)
class TrafficSnapshot:
    extent: Interval
    ego_id: str
    cars: Tuple[CarOccupancy, ...]
    crossing: Interval
    pedestrians: Tuple[Pedestrian, ...] = ()
    signs: Tuple[Sign, ...] = ()
    perception_distance: Fraction = Fraction(0)
    approach_distance: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "cars", tuple(self.cars))
        object.__setattr__(self, "pedestrians", tuple(self.pedestrians))
        object.__setattr__(self, "signs", tuple(self.signs))
        object.__setattr__(self, "perception_distance", rational(self.perception_distance))
        object.__setattr__(self, "approach_distance", rational(self.approach_distance))

    def car(self, car_id: str) -> CarOccupancy:
        for c in self.cars:
            if c.id == car_id:
                return c
        raise KeyError(car_id)

    @property
    def ego(self) -> CarOccupancy:
        return self.car(self.ego_id)

    @property
    def car_ids(self) -> Tuple[str, ...]:
        return tuple(c.id for c in self.cars)


def validate_snapshot(s: TrafficSnapshot) -> list[str]:
    """Return the list of invariant violations; an empty list means ok."""
    problems = []
    ext = s.extent
    ids = [c.id for c in s.cars]
    seen = set()
    for cid in ids:
        if cid in seen:
            problems.append(f"duplicate id {cid!r}")
        seen.add(cid)
    n_ego = ids.count(s.ego_id)
    if n_ego == 0:
        problems.append(f"ego {s.ego_id!r} is not among the cars")
    for c in s.cars:
        if c.size <= 0:
            problems.append(f"car {c.id!r}: size must be positive")
        if not ext.contains(c.reservation):
            problems.append(f"occupancy outside extent: car {c.id!r} reservation {c.reservation}")
        if c.claim is not None and not ext.contains(c.claim):
            problems.append(f"occupancy outside extent: car {c.id!r} claim {c.claim}")
    if not ext.contains(s.crossing):
        problems.append(f"crossing {s.crossing} outside extent")
    for p in s.pedestrians:
        if not ext.contains(p.on):
            problems.append(f"pedestrian {p.on} outside extent")
    for sign in s.signs:
        if not sign.kind:
            problems.append("sign with empty kind")
        if not ext.contains_point(sign.at):
            problems.append(f"sign {sign.kind} at {sign.at} outside extent")
    if s.perception_distance < 0:
        problems.append("perception_distance must be nonnegative")
    if s.approach_distance < 0:
        problems.append("approach_distance must be nonnegative")
    return problems


def event_points(s: TrafficSnapshot, v: Interval) -> list[Fraction]:
    """Sorted, deduplicated positions in ``v`` where view-dependent atoms can change.

    Claims and sign positions are left out on purpose: no atom whose truth
    depends on the view looks at them.
    """
    if not s.extent.contains(v):
        raise SpatialDomainError(f"view {v} outside extent {s.extent}")
    pts = {v.lo, v.hi}
    intervals = [c.reservation for c in s.cars] + [p.on for p in s.pedestrians]
    intervals.append(s.crossing)
    for iv in intervals:
        for p in (iv.lo, iv.hi):
            if v.lo <= p <= v.hi:
                pts.add(p)
    return sorted(pts)


@dataclass(frozen=True)
class UniverseParams:
    """Bounded description of the environments a rule set is checked against.

    Other cars are named ``C1``..``Cn``. A snapshot holds 0..``max_cars`` of
    them with pairwise non-overlapping reservations that also avoid the ego
    reservation, placed in ascending order so no arrangement is produced
    twice. Each element of ``pedestrian_options`` is one complete pedestrian
    configuration (a tuple, possibly empty); every subset of ``sign_kinds``
    is tried, each sign placed at ``sign_position``.
    """

    max_cars: int
    position_grid_step: Fraction
    car_sizes: Tuple[Fraction, ...]
    extent: Interval
    crossing: Interval
    pedestrian_options: Tuple[Tuple[Pedestrian, ...], ...] = ((),)
    sign_kinds: Tuple[str, ...] = ()
    ego_id: str = "E"
    ego_reservation: Optional[Interval] = None
    ego_claim: Optional[Interval] = None
    ego_size: Optional[Fraction] = None
    sign_position: Optional[Fraction] = None
    perception_distance: Fraction = Fraction(0)
    approach_distance: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "position_grid_step", rational(self.position_grid_step))
        object.__setattr__(self, "car_sizes", tuple(sorted(rational(x) for x in self.car_sizes)))
        object.__setattr__(self, "sign_kinds", tuple(sorted(set(self.sign_kinds))))
        object.__setattr__(self, "pedestrian_options", tuple(tuple(o) for o in self.pedestrian_options))
        object.__setattr__(self, "perception_distance", rational(self.perception_distance))
        object.__setattr__(self, "approach_distance", rational(self.approach_distance))
        if self.ego_size is not None:
            object.__setattr__(self, "ego_size", rational(self.ego_size))
        if self.sign_position is not None:
            object.__setattr__(self, "sign_position", rational(self.sign_position))
        if self.max_cars < 0:
            raise ValueError("max_cars must be >= 0")
        if self.position_grid_step <= 0:
            raise ValueError("position_grid_step must be positive")
        if (self.extent.length / self.position_grid_step).denominator != 1:
            raise ValueError("grid step must divide the extent length")

    @property
    def resolved_ego_size(self) -> Fraction:
        if self.ego_size is not None:
            return self.ego_size
        if self.ego_reservation is not None:
            return max(self.ego_reservation.length, Fraction(1))
        return self.car_sizes[0] if self.car_sizes else Fraction(1)

    @property
    def resolved_ego_reservation(self) -> Interval:
        if self.ego_reservation is not None:
            return self.ego_reservation
        lo = self.extent.lo
        return Interval(lo, lo + self.resolved_ego_size)

    def grid_positions(self) -> list[Fraction]:
        step = self.position_grid_step
        n = int(self.extent.length / step)
        return [self.extent.lo + k * step for k in range(n + 1)]


def _car_placements(p: UniverseParams) -> list[Tuple[Fraction, Fraction]]:
    ego = p.resolved_ego_reservation
    out = []
    for pos in p.grid_positions():
        for size in p.car_sizes:
            res = Interval(pos, pos + size)
            if p.extent.contains(res) and res.overlap(ego) == 0:
                out.append((pos, size))
    return out


def enumerate_universe(p: UniverseParams) -> Iterator[TrafficSnapshot]:
    """Yield every snapshot composable from ``p``, in a fixed order."""
    ego = CarOccupancy(p.ego_id, p.resolved_ego_reservation, p.resolved_ego_size, p.ego_claim)
    placements = _car_placements(p)
    sign_at = p.sign_position if p.sign_position is not None else p.crossing.lo
    sign_sets = [
        combo
        for r in range(len(p.sign_kinds) + 1)
        for combo in itertools.combinations(p.sign_kinds, r)
    ]
    car_sets = []
    for k in range(p.max_cars + 1):
        for combo in itertools.combinations(placements, k):
            ivs = [Interval(pos, pos + size) for pos, size in combo]
            if all(a.overlap(b) == 0 for a, b in itertools.combinations(ivs, 2)):
                car_sets.append(combo)
    for combo in car_sets:
        others = tuple(
            CarOccupancy(f"C{i + 1}", Interval(pos, pos + size), size)
            for i, (pos, size) in enumerate(combo)
        )
        for peds in p.pedestrian_options:
            for kinds in sign_sets:
                snap = TrafficSnapshot(
                    extent=p.extent,
                    ego_id=p.ego_id,
                    cars=(ego,) + others,
                    crossing=p.crossing,
                    pedestrians=peds,
                    signs=tuple(Sign(k, sign_at) for k in kinds),
                    perception_distance=p.perception_distance,
                    approach_distance=p.approach_distance,
                )
                if not validate_snapshot(snap):
                    yield snap


def default_universe(sign_kinds: Iterable[str] = ()) -> UniverseParams:
    """The universe used by ``conflicts --universe default``.

    Ego ``E`` of size 2 sits at [0, 2] and claims the path up to the end of
    the crossing [8, 14]; at most one other car; a pedestrian on the crossing
    who has or has not started to cross, or nobody.
    """
    crossing = Interval(8, 14)
    return UniverseParams(
        max_cars=1,
        position_grid_step=Fraction(2),
        car_sizes=(Fraction(2),),
        extent=Interval(0, 16),
        crossing=crossing,
        pedestrian_options=(
            (),
            (Pedestrian(Interval(10, 11), True),),
            (Pedestrian(Interval(10, 11), False),),
        ),
        sign_kinds=tuple(sign_kinds),
        ego_id="E",
        ego_reservation=Interval(0, 2),
        ego_claim=Interval(2, 14),
        ego_size=Fraction(2),
        sign_position=Fraction(7),
        perception_distance=Fraction(8),
        approach_distance=Fraction(8),
    )


def ensure_view(s: TrafficSnapshot, v: Optional[Interval]) -> Interval:
    if v is None:
        return s.extent
    if not s.extent.contains(v):
        raise SpatialDomainError(f"view {v} outside extent {s.extent}")
    return v

