"""Brute-force grid evaluation, used to cross-check :func:`evaluate`.

Every view-dependent subformula is tabulated as a boolean matrix ``M[i, j]``
over all grid intervals ``[p_i, p_j]``. Chop is then a boolean matrix
product and ``<<f>>`` is ``T @ M @ T`` with ``T`` the "i <= j" matrix.
Positions are scaled to integers first so every comparison stays exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from ..spatial import Interval, TrafficSnapshot, event_points
from . import atoms
from . import formula as F
from .evaluate import EvaluationError, _check_view


class _Grid:
    def __init__(self, s: TrafficSnapshot, v: Interval, step: Fraction, extra=()):
        pts = set(event_points(s, v))
        k = 0
        while v.lo + k * step <= v.hi:
            pts.add(v.lo + k * step)
            k += 1
        self.points = sorted(pts)
        vals = list(self.points) + [c.size for c in s.cars] + [s.approach_distance] + list(extra)
        for iv in atoms.blocking_intervals(s) + [s.crossing]:
            vals += [iv.lo, iv.hi]
        self.scale = 1
        for x in vals:
            self.scale = self.scale * x.denominator // math.gcd(self.scale, x.denominator)
        self.P = np.array([int(p * self.scale) for p in self.points], dtype=np.int64)
        n = len(self.points)
        self.upper = np.triu(np.ones((n, n), dtype=bool))
        self.lo_col = self.P[:, None]
        self.hi_row = self.P[None, :]

    def scaled(self, x: Fraction) -> int:
        y = x * self.scale
        assert y.denominator == 1
        return int(y)

    def index(self, p: Fraction) -> int:
        return self.points.index(p)


def evaluate_oracle(
    f: F.Formula,
    s: TrafficSnapshot,
    v: Optional[Interval] = None,
    env: Optional[Mapping[str, str]] = None,
    grid_step=Fraction(1, 4),
) -> bool:
    """Evaluate ``f`` with chop splits restricted to a grid plus event points.

    Agrees with :func:`evaluate` whenever the grid is fine enough: with
    constants and occupancies on a grid ``g``, a step of
    ``g / 2**chop_depth(f)`` suffices.
    """
    grid_step = Fraction(grid_step)
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    v = _check_view(s, v)
    consts = [n.bound.value for n in F.walk(f) if isinstance(n, F.LengthGE) and isinstance(n.bound, F.Const)]
    g = _Grid(s, v, grid_step, consts)
    cars = {c.id: c for c in s.cars}
    U = g.upper

    def car(ref, env):
        name = env.get(ref.name) if isinstance(ref, F.Var) else ref.name
        if name is None or name not in cars:
            raise EvaluationError(f"cannot resolve {ref}")
        return cars[name]

    def const(b: bool):
        return U.copy() if b else np.zeros_like(U)

    def free():
        m = U.copy()
        for b in atoms.blocking_intervals(s):
            lo, hi = g.scaled(b.lo), g.scaled(b.hi)
            m &= ~(np.maximum(g.lo_col, lo) < np.minimum(g.hi_row, hi))
        return m

    def inside(iv: Interval):
        return U & (g.lo_col >= g.scaled(iv.lo)) & (g.hi_row <= g.scaled(iv.hi))

    def longer(k: Fraction):
        return U & ((g.hi_row - g.lo_col) >= g.scaled(k))

    def chop(a, b):
        return (a.astype(np.float64) @ b.astype(np.float64)) > 0

    def go(f, env) -> np.ndarray:
        if isinstance(f, F.TrueF):
            return const(True)
        if isinstance(f, F.FalseF):
            return const(False)
        if isinstance(f, F.Free):
            return free()
        if isinstance(f, F.Cs):
            return inside(s.crossing)
        if isinstance(f, F.Re):
            return inside(car(f.car, env).reservation)
        if isinstance(f, F.LengthGE):
            return longer(atoms.length_value(f.bound, s, lambda r: car(r, env)))
        if isinstance(f, F.Sg):
            return free() & longer(car(f.car, env).size)
        if isinstance(f, F.Pc):
            return const(atoms.potential_collision(s, car(f.car, env)))
        if isinstance(f, F.Pa):
            return const(atoms.pedestrian_ahead(s, car(f.car, env)))
        if isinstance(f, F.Ob):
            return const(atoms.observed(s, f.kind))
        if isinstance(f, F.Not):
            return U & ~go(f.arg, env)
        if isinstance(f, F.And):
            return go(f.left, env) & go(f.right, env)
        if isinstance(f, F.Or):
            return go(f.left, env) | go(f.right, env)
        if isinstance(f, F.Chop):
            return chop(go(f.left, env), go(f.right, env))
        if isinstance(f, F.Somewhere):
            T = U.astype(np.float64)
            return (T @ go(f.arg, env).astype(np.float64) @ T) > 0
        if isinstance(f, (F.Exists, F.Forall)):
            used = set(env.values())
            mats = [go(f.body, {**env, f.var: c.id}) for c in s.cars if c.id not in used]
            if isinstance(f, F.Exists):
                out = const(False)
                for m in mats:
                    out |= m
            else:
                out = const(True)
                for m in mats:
                    out &= m
            return out
        raise TypeError(f"not a formula: {f!r}")

    m = go(f, dict(env or {}))
    return bool(m[g.index(v.lo), g.index(v.hi)])
