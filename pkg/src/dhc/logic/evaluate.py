"""Exact evaluation of formulas over a snapshot view.

Chop is decided by testing finitely many split points. The truth of either
side, as a function of the split, only changes at event points shifted by
sums of length constants (one shift per level of chop nesting), so testing
those points plus one point strictly inside every gap between consecutive
ones is exact. The inner points matter once negation turns closed length
or containment conditions into strict ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from ..spatial import Interval, SpatialDomainError, TrafficSnapshot, event_points
from . import atoms
from . import formula as F


class EvaluationError(ValueError):
    """A variable or car id cannot be resolved against the snapshot."""


def _length_constants(f: F.Formula, s: TrafficSnapshot) -> set[Fraction]:
    out: set[Fraction] = set()
    all_sizes = {c.size for c in s.cars}
    for node in F.walk(f):
        ref = None
        if isinstance(node, F.LengthGE):
            b = node.bound
            if isinstance(b, F.Const):
                out.add(b.value)
            elif isinstance(b, F.ApproachDistance):
                out.add(s.approach_distance)
            else:
                ref = b.car
        elif isinstance(node, F.Sg):
            ref = node.car
        if ref is not None:
            if isinstance(ref, F.CarId) and ref.name in s.car_ids:
                out.add(s.car(ref.name).size)
            else:
                out |= all_sizes
    out.discard(Fraction(0))
    return out


def _num(x):
    # integral values as ints: much cheaper to add, compare and hash
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _mid(a, b):
    t = a + b
    if isinstance(t, int):
        return t // 2 if t % 2 == 0 else Fraction(t, 2)
    return _num(t / 2)


def _shift_closure(base, consts, depth, lo, hi) -> list[Fraction]:
    pts = set(base)
    frontier = set(base)
    for _ in range(depth):
        new = set()
        for p in frontier:
            for k in consts:
                for q in (p + k, p - k):
                    if lo <= q <= hi and q not in pts:
                        new.add(_num(q))
        if not new:
            break
        pts |= new
        frontier = new
    return sorted(pts)


def split_candidates(f: F.Formula, s: TrafficSnapshot, v: Interval) -> list[Fraction]:
    """Event points of ``v`` closed under shifting by the length constants of ``f``.

    Shifting is repeated ``chop_depth(f)`` times and clipped to ``v``.
    """
    base = event_points(s, v)
    if v.lo == v.hi:
        return [v.lo]
    consts = _length_constants(f, s)
    return _shift_closure(base, consts, max(F.chop_depth(f), 1), v.lo, v.hi)


def _with_midpoints(pts: list[Fraction]) -> list[Fraction]:
    out = [pts[0]]
    for a, b in zip(pts, pts[1:]):
        out.append(_mid(a, b))
        out.append(b)
    return out


@dataclass(frozen=True)
class SplitWitness:
    formula: str
    lo: Fraction
    split: Fraction
    hi: Fraction


class Evaluator:
    """Memoising evaluator bound to one snapshot.

    Reuse one instance to evaluate many formulas on the same snapshot; the
    memo is keyed on node identity, so keep the formulas alive meanwhile.
    """

    def __init__(self, snapshot: TrafficSnapshot):
        self.s = snapshot
        self.cars = {c.id: c for c in snapshot.cars}
        self.blockers = atoms.blocking_intervals(snapshot)
        self._memo: dict = {}
        self._consts: dict = {}
        self._desugared: dict = {}
        self._pinned: list = []
        self._cands: dict = {}
        pts = set()
        for iv in [c.reservation for c in snapshot.cars] + [p.on for p in snapshot.pedestrians] + [snapshot.crossing]:
            pts.update((_num(iv.lo), _num(iv.hi)))
        self._events = sorted(pts)

    def resolve(self, ref: F.CarRef, env):
        if isinstance(ref, F.Var):
            for name, cid in env:
                if name == ref.name:
                    break
            else:
                raise EvaluationError(f"unresolvable variable {ref.name!r}")
        else:
            cid = ref.name
        try:
            return self.cars[cid]
        except KeyError:
            raise EvaluationError(f"no car {cid!r} in snapshot") from None

    def _free(self, lo, hi) -> bool:
        return not any(max(lo, b.lo) < min(hi, b.hi) for b in self.blockers)

    def _length(self, bound, env) -> Fraction:
        return atoms.length_value(bound, self.s, lambda r: self.resolve(r, env))

    def _candidates(self, node: F.Formula, lo, hi) -> list[Fraction]:
        if lo == hi:
            return [lo]
        ckey = (id(node), lo, hi)
        cached = self._cands.get(ckey)
        if cached is not None:
            return cached
        key = id(node)
        info = self._consts.get(key)
        if info is None:
            consts = sorted({_num(k) for k in _length_constants(node, self.s)})
            info = (consts, max(F.chop_depth(node), 1))
            self._consts[key] = info
        consts, depth = info
        base = {lo, hi}
        base.update(p for p in self._events if lo < p < hi)
        out = _with_midpoints(_shift_closure(base, consts, depth, lo, hi))
        self._cands[ckey] = out
        return out

    def _somewhere(self, node: F.Somewhere) -> F.Chop:
        key = id(node)
        d = self._desugared.get(key)
        if d is None:
            d = F.Chop(F.TrueF(), F.Chop(node.arg, F.TrueF()))
            self._desugared[key] = d
            self._pinned.append(node)
        return d

    def check(self, f: F.Formula, v: Optional[Interval] = None, env=()) -> bool:
        """Truth of ``f`` on ``v`` (default: the extent)."""
        v = self.s.extent if v is None else v
        return self.holds(f, _num(v.lo), _num(v.hi), env)

    def holds(self, f: F.Formula, lo: Fraction, hi: Fraction, env=()) -> bool:
        key = (id(f), lo, hi, env)
        r = self._memo.get(key)
        if r is None:
            r = self._holds(f, lo, hi, env)
            self._memo[key] = r
        return r

    def _holds(self, f, lo, hi, env) -> bool:
        s = self.s
        if isinstance(f, F.TrueF):
            return True
        if isinstance(f, F.FalseF):
            return False
        if isinstance(f, F.Free):
            return self._free(lo, hi)
        if isinstance(f, F.Cs):
            return s.crossing.lo <= lo and hi <= s.crossing.hi
        if isinstance(f, F.Re):
            r = self.resolve(f.car, env).reservation
            return r.lo <= lo and hi <= r.hi
        if isinstance(f, F.LengthGE):
            return hi - lo >= self._length(f.bound, env)
        if isinstance(f, F.Sg):
            car = self.resolve(f.car, env)
            return hi - lo >= car.size and self._free(lo, hi)
        if isinstance(f, F.Pc):
            return atoms.potential_collision(s, self.resolve(f.car, env))
        if isinstance(f, F.Pa):
            return atoms.pedestrian_ahead(s, self.resolve(f.car, env))
        if isinstance(f, F.Ob):
            return atoms.observed(s, f.kind)
        if isinstance(f, F.Not):
            return not self.holds(f.arg, lo, hi, env)
        if isinstance(f, F.And):
            return self.holds(f.left, lo, hi, env) and self.holds(f.right, lo, hi, env)
        if isinstance(f, F.Or):
            return self.holds(f.left, lo, hi, env) or self.holds(f.right, lo, hi, env)
        if isinstance(f, F.Chop):
            return self._chop_split(f, lo, hi, env) is not None
        if isinstance(f, F.Somewhere):
            return self.holds(self._somewhere(f), lo, hi, env)
        if isinstance(f, (F.Exists, F.Forall)):
            used = {cid for _, cid in env}
            results = (
                self.holds(f.body, lo, hi, _bind(env, f.var, c.id))
                for c in s.cars
                if c.id not in used
            )
            return any(results) if isinstance(f, F.Exists) else all(results)
        raise TypeError(f"not a formula: {f!r}")

    def _chop_split(self, f: F.Chop, lo, hi, env) -> Optional[Fraction]:
        for m in self._candidates(f, lo, hi):
            if self.holds(f.left, lo, m, env) and self.holds(f.right, m, hi, env):
                return m
        return None

    def witnesses(self, f: F.Formula, lo, hi, env=()) -> list[SplitWitness]:
        """Split points along one satisfying derivation of ``f`` (empty if false)."""
        out: list[SplitWitness] = []
        self._explain(f, lo, hi, env, out)
        return out

    def _explain(self, f, lo, hi, env, out):
        if not self.holds(f, lo, hi, env):
            return
        if isinstance(f, F.Somewhere):
            f = self._somewhere(f)
        if isinstance(f, F.Chop):
            m = self._chop_split(f, lo, hi, env)
            out.append(SplitWitness(str(f), Fraction(lo), Fraction(m), Fraction(hi)))
            self._explain(f.left, lo, m, env, out)
            self._explain(f.right, m, hi, env, out)
        elif isinstance(f, F.And):
            self._explain(f.left, lo, hi, env, out)
            self._explain(f.right, lo, hi, env, out)
        elif isinstance(f, F.Or):
            side = f.left if self.holds(f.left, lo, hi, env) else f.right
            self._explain(side, lo, hi, env, out)
        elif isinstance(f, F.Exists):
            used = {cid for _, cid in env}
            for c in self.s.cars:
                e2 = _bind(env, f.var, c.id)
                if c.id not in used and self.holds(f.body, lo, hi, e2):
                    self._explain(f.body, lo, hi, e2, out)
                    return


def _bind(env, var, cid):
    return tuple(sorted([(n, c) for n, c in env if n != var] + [(var, cid)]))


def _env_tuple(env: Optional[Mapping[str, str]]):
    return tuple(sorted((env or {}).items()))


def _check_view(s: TrafficSnapshot, v: Optional[Interval]) -> Interval:
    v = s.extent if v is None else v
    if not s.extent.contains(v):
        raise SpatialDomainError(f"view {v} outside extent {s.extent}")
    return v


def evaluate(
    f: F.Formula,
    s: TrafficSnapshot,
    v: Optional[Interval] = None,
    env: Optional[Mapping[str, str]] = None,
) -> bool:
    """Truth of ``f`` on view ``v`` (default: the whole extent) of snapshot ``s``."""
    v = _check_view(s, v)
    env_t = _env_tuple(env)
    missing = F.free_variables(f) - {n for n, _ in env_t}
    if missing:
        raise EvaluationError(f"unresolvable variable(s): {', '.join(sorted(missing))}")
    return Evaluator(s).holds(f, _num(v.lo), _num(v.hi), env_t)


def explain(f, s, v=None, env=None) -> tuple[bool, list[SplitWitness]]:
    v = _check_view(s, v)
    ev = Evaluator(s)
    env_t = _env_tuple(env)
    lo, hi = _num(v.lo), _num(v.hi)
    value = ev.holds(f, lo, hi, env_t)
    return value, ev.witnesses(f, lo, hi, env_t)
