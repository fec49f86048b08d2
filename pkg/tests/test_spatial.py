import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dhc.spatial import (
    CarOccupancy, Interval, Pedestrian, Sign, SpatialDomainError, TrafficSnapshot, UniverseParams,
    default_universe, enumerate_universe, event_points, rational, validate_snapshot,
)


def snapshot(cars=None, extent=(0, 20), crossing=(12, 16), **kw):
    cars = cars or [CarOccupancy("E", Interval(0, 0), 1)]
    return TrafficSnapshot(Interval(*extent), "E", tuple(cars), Interval(*crossing), **kw)


def test_rational_is_exact():
    assert rational("7/2") == Fraction(7, 2)
    assert rational("0.1") == Fraction(1, 10)
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(TypeError):
        rational(True)


def test_interval_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        Interval(3, 2)
    assert Interval(4, 4).length == 0


def test_overlap_and_interior():
    assert Interval(0, 2).overlap(Interval(2, 4)) == 0
    assert Interval(0, 3).overlap(Interval(2, 4)) == 1
    assert not Interval(0, 2).interior_meets(Interval(2, 4))
    assert Interval(0, 2).meets(Interval(2, 4))


def test_validate_ok():
    s = snapshot([CarOccupancy("E", Interval(0, 2), 2)])
    assert validate_snapshot(s) == []


def test_validate_outside_extent():
    s = snapshot([CarOccupancy("E", Interval(0, 2), 2), CarOccupancy("B", Interval(18, 22), 2)])
    assert any("occupancy outside extent" in p for p in validate_snapshot(s))


def test_validate_duplicate_id():
    s = TrafficSnapshot(Interval(0, 20), "A", (CarOccupancy("A", Interval(0, 2), 2), CarOccupancy("A", Interval(4, 6), 2)),
                        Interval(8, 14))
    assert any("duplicate id" in p for p in validate_snapshot(s))


def test_validate_missing_ego():
    s = TrafficSnapshot(Interval(0, 20), "Z", (CarOccupancy("A", Interval(0, 2), 2),), Interval(8, 14))
    assert validate_snapshot(s)


def test_event_points_empty():
    assert event_points(snapshot(), Interval(0, 10)) == [0, 10]


def test_event_points_one_car():
    s = snapshot([CarOccupancy("E", Interval(0, 0), 1), CarOccupancy("B", Interval(3, 5), 2)])
    assert event_points(s, Interval(0, 10)) == [0, 3, 5, 10]


def test_event_points_clip_crossing():
    s = snapshot(crossing=(8, 14))
    v = Interval(0, 10)
    # independent: every endpoint of every interval that lies within v, plus the view ends
    expected = sorted({v.lo, v.hi} | {p for iv in (s.crossing, s.ego.reservation) for p in (iv.lo, iv.hi) if v.lo <= p <= v.hi})
    assert expected == [0, 8, 10]
    assert event_points(s, v) == expected


def test_event_points_outside_extent():
    with pytest.raises(SpatialDomainError):
        event_points(snapshot(), Interval(15, 25))


@given(st.integers(0, 20), st.integers(0, 20), st.lists(st.tuples(st.integers(0, 20), st.integers(0, 5)), max_size=4))
def test_event_points_sorted_with_ends(a, b, cars):
    lo, hi = min(a, b), max(a, b)
    occ = [CarOccupancy("E", Interval(0, 0), 1)] + [
        CarOccupancy(f"C{i}", Interval(p, min(p + w, 20)), 1) for i, (p, w) in enumerate(cars)
    ]
    pts = event_points(snapshot(occ), Interval(lo, hi))
    assert pts[0] == lo and pts[-1] == hi
    assert all(x < y for x, y in zip(pts, pts[1:])) or lo == hi


def test_universe_ego_only():
    p = UniverseParams(max_cars=0, position_grid_step=1, car_sizes=(1,), extent=Interval(0, 4), crossing=Interval(2, 4))
    assert len(list(enumerate_universe(p))) == 1


def _brute_count(extent_hi, step, sizes, ego, max_cars):
    # independent generator: all sets of non-overlapping placements avoiding the ego
    places = []
    pos = 0
    while pos <= extent_hi:
        for sz in sizes:
            if pos + sz <= extent_hi and max(pos, ego[0]) >= min(pos + sz, ego[1]):
                places.append((pos, pos + sz))
        pos += step
    n = 0
    for k in range(max_cars + 1):
        for combo in itertools.combinations(places, k):
            if all(max(a[0], b[0]) >= min(a[1], b[1]) for a, b in itertools.combinations(combo, 2)):
                n += 1
    return n


def test_universe_count_matches_brute_force():
    p = UniverseParams(max_cars=1, position_grid_step=2, car_sizes=(2,), extent=Interval(0, 4), crossing=Interval(2, 4))
    expected = _brute_count(4, 2, [2], (0, 2), 1)
    assert expected == 2
    assert len(list(enumerate_universe(p))) == expected


def test_universe_count_two_cars():
    p = UniverseParams(max_cars=2, position_grid_step=1, car_sizes=(1, 2), extent=Interval(0, 6), crossing=Interval(3, 6),
                       ego_reservation=Interval(0, 1), ego_size=1)
    assert len(list(enumerate_universe(p))) == _brute_count(6, 1, [1, 2], (0, 1), 2)


def test_universe_distinct_and_valid():
    snaps = list(enumerate_universe(default_universe(("Stop", "SWL"))))
    assert len(snaps) == len(set(snaps))
    assert all(validate_snapshot(s) == [] for s in snaps)
    assert len(snaps) == 8 * 3 * 4


def test_universe_grid_must_divide():
    with pytest.raises(ValueError):
        UniverseParams(max_cars=0, position_grid_step=3, car_sizes=(1,), extent=Interval(0, 4), crossing=Interval(2, 4))


def test_snapshot_is_hashable_value():
    a = snapshot(signs=(Sign("Stop", 3),), pedestrians=(Pedestrian(Interval(1, 2), True),))
    b = snapshot(signs=(Sign("Stop", 3),), pedestrians=(Pedestrian(Interval(1, 2), True),))
    assert a == b and hash(a) == hash(b)
