"""View-independent atoms, shared by the exact evaluator and the grid oracle."""

from __future__ import annotations

from fractions import Fraction

from ..spatial import CarOccupancy, Interval, TrafficSnapshot


def potential_collision(s: TrafficSnapshot, car: CarOccupancy) -> bool:
    if car.id == s.ego_id:
        return False
    ego = s.ego
    return any(a.overlap(b) > 0 for a in car.footprint for b in ego.footprint)


def pedestrian_ahead(s: TrafficSnapshot, car: CarOccupancy) -> bool:
    if car.claim is None:
        return False
    front = car.reservation.hi
    lo = max(car.claim.lo, front)
    if lo > car.claim.hi:
        return False
    ahead = Interval(lo, car.claim.hi)
    return any(p.started_crossing and p.on.meets(ahead) for p in s.pedestrians)


def observed(s: TrafficSnapshot, kind: str) -> bool:
    front = s.ego.reservation.hi
    horizon = front + s.perception_distance
    return any(sign.kind == kind and front <= sign.at <= horizon for sign in s.signs)


def blocking_intervals(s: TrafficSnapshot) -> list[Interval]:
    """Stretches that make space non-free: every reservation and every pedestrian."""
    return [c.reservation for c in s.cars] + [p.on for p in s.pedestrians]


def length_value(bound, s: TrafficSnapshot, resolve) -> Fraction:
    from . import formula as F

    if isinstance(bound, F.Const):
        return bound.value
    if isinstance(bound, F.ApproachDistance):
        return s.approach_distance
    return resolve(bound.car).size
