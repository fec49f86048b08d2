"""Seeded random generators shared by the property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from dhc.automata.model import ClockAtom, ClockConstraint, Location, RuleAutomaton, Transition
from dhc.logic import formula as F
from dhc.spatial import CarOccupancy, Interval, Pedestrian, Sign, TrafficSnapshot

SIGN_KINDS = ("Stop", "SWL", "Go")
VARS = ("c", "d")


def grid_interval(rng: random.Random, lo, hi, g, min_len=0):
    n = int((hi - lo) / g)
    a = rng.randint(0, n - int(min_len / g))
    b = rng.randint(a + int(min_len / g), n)
    return Interval(lo + a * g, lo + b * g)


def random_snapshot(rng: random.Random, g=Fraction(1), length=12, max_cars=3) -> TrafficSnapshot:
    """Snapshot with everything on the grid ``g``; cars E, B, C (E is ego)."""
    extent = Interval(0, length)
    ids = ["E", "B", "C"][: rng.randint(1, max_cars)]
    cars = []
    for cid in ids:
        res = grid_interval(rng, 0, length, g)
        size = g * rng.randint(1, 3)
        claim = None
        if rng.random() < 0.5 and res.hi < length:
            claim = Interval(res.hi, res.hi + g * rng.randint(0, int((length - res.hi) / g)))
        cars.append(CarOccupancy(cid, res, size, claim))
    peds = tuple(
        Pedestrian(grid_interval(rng, 0, length, g), rng.random() < 0.5) for _ in range(rng.randint(0, 1))
    )
    signs = tuple(Sign(k, g * rng.randint(0, int(length / g))) for k in SIGN_KINDS if rng.random() < 0.3)
    return TrafficSnapshot(
        extent=extent,
        ego_id="E",
        cars=tuple(cars),
        crossing=grid_interval(rng, 0, length, g, min_len=g),
        pedestrians=peds,
        signs=signs,
        perception_distance=g * rng.randint(0, int(length / g)),
        approach_distance=g * rng.randint(0, 4),
    )


def random_formula(rng: random.Random, depth: int, cars=("E", "B"), bound=(), g=Fraction(1), max_len=12):
    """Random closed formula of nesting depth at most ``depth``."""
    refs = [F.CarId(c) for c in cars] + [F.Var(v) for v in bound]

    def ref():
        return rng.choice(refs)

    if depth == 0 or rng.random() < 0.25:
        pick = rng.randrange(11)
        if pick == 0:
            return F.TrueF()
        if pick == 1:
            return F.FalseF()
        if pick == 2:
            return F.Free()
        if pick == 3:
            return F.Cs()
        if pick == 4:
            return F.Re(ref())
        if pick == 5:
            return F.Sg(ref())
        if pick == 6:
            return F.Pc(ref())
        if pick == 7:
            return F.Pa(ref())
        if pick == 8:
            return F.Ob(rng.choice(SIGN_KINDS))
        if pick == 9:
            return F.LengthGE(F.Size(ref()))
        return F.LengthGE(F.Const(g * rng.randint(0, int(max_len / g))))
    sub = lambda: random_formula(rng, depth - 1, cars, bound, g, max_len)  # noqa: E731
    op = rng.randrange(8)
    if op == 0:
        return F.Not(sub())
    if op == 1:
        return F.And(sub(), sub())
    if op == 2:
        return F.Or(sub(), sub())
    if op in (3, 4):
        return F.Chop(sub(), sub())
    if op == 5:
        return F.Somewhere(sub())
    var = rng.choice(VARS)
    body = random_formula(rng, depth - 1, cars, tuple(set(bound) | {var}), g, max_len)
    return (F.Exists if op == 6 else F.Forall)(var, body)


# -- automata ----------------------------------------------------------------

SPATIAL_POOL = ("ob(Stop)", "ob(SWL)", "not ob(Stop)", "ob(Stop) and ob(SWL)", "not ob(Go)", "ob(Go) or ob(SWL)")


def sign_scenarios(rng: random.Random, count: int) -> list[TrafficSnapshot]:
    """Snapshots differing only in which signs are in view."""
    out = []
    for _ in range(count):
        kinds = [k for k in SIGN_KINDS if rng.random() < 0.5]
        out.append(TrafficSnapshot(
            extent=Interval(0, 10), ego_id="E", cars=(CarOccupancy("E", Interval(0, 1), Fraction(1)),),
            crossing=Interval(5, 8), signs=tuple(Sign(k, 3) for k in kinds), perception_distance=5,
        ))
    return out


def random_automaton(rng: random.Random, name="R", max_locs=4, max_clocks=2, max_const=5, spatial=True,
                     actions=("a", "b", "c")) -> RuleAutomaton:
    from dhc.logic import parse_formula

    clocks = ("x", "y")[: rng.randint(1, max_clocks)]
    n = rng.randint(min(2, max_locs), max_locs)
    names = [f"L{i}" for i in range(n)]

    def cc(op_choices, k):
        atoms = []
        for _ in range(rng.randint(0, k)):
            atoms.append(ClockAtom(rng.choice(clocks), rng.choice(op_choices), rng.randint(0, max_const)))
        return ClockConstraint(tuple(atoms))

    def spatial_formula():
        if spatial and rng.random() < 0.5:
            return parse_formula(rng.choice(SPATIAL_POOL))
        return None

    locs = []
    for i, ln in enumerate(names):
        inv = cc(("<=",), 1) if rng.random() < 0.5 else ClockConstraint()
        sp = spatial_formula() if rng.random() < 0.3 else None
        forbid = tuple(a for a in actions if rng.random() < 0.2)
        locs.append(Location(ln, inv, sp, i == 0, forbid))
    trans = []
    for _ in range(rng.randint(n, 3 * n)):
        g = spatial_formula()
        trans.append(Transition(
            rng.choice(names), rng.choice(names), rng.choice(actions),
            g if g is not None else F.TrueF(), cc(("<=", ">="), 2),
            tuple(c for c in clocks if rng.random() < 0.4),
        ))
    return RuleAutomaton(name, clocks, tuple(actions), tuple(locs), tuple(trans))
