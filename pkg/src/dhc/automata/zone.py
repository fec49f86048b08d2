"""Zones: convex sets of clock valuations as canonical DBMs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import dbm
from .dbm import INF, LE_ZERO, le, lt

_k = dbm.kernel


@dataclass(frozen=True)
class Zone:
    """Canonical, possibly empty zone over ``clocks``.

    ``bounds`` is the flat DBM (see :mod:`dhc.automata._dbm_py`); it is None
    for the empty zone.
    """

    clocks: tuple[str, ...]
    bounds: Optional[tuple[int, ...]]

    @property
    def dim(self) -> int:
        return len(self.clocks) + 1

    @property
    def empty(self) -> bool:
        return self.bounds is None

    @classmethod
    def zero(cls, clocks: Sequence[str]) -> "Zone":
        n = len(clocks) + 1
        return cls(tuple(clocks), tuple([LE_ZERO] * (n * n)))

    @classmethod
    def universe(cls, clocks: Sequence[str]) -> "Zone":
        n = len(clocks) + 1
        d = [INF] * (n * n)
        for i in range(n):
            d[i * n + i] = LE_ZERO
            d[i] = LE_ZERO  # 0 - x_i <= 0
        return cls(tuple(clocks), tuple(d))

    @classmethod
    def from_bounds(cls, clocks, d) -> "Zone":
        c = _k.canonical(list(d), len(clocks) + 1)
        return cls(tuple(clocks), None if c is None else tuple(c))

    def index(self, clock: str) -> int:
        return self.clocks.index(clock) + 1

    def _wrap(self, d) -> "Zone":
        return Zone(self.clocks, None if d is None else tuple(d))

    def upper(self, clock: str):
        """(bound, is_non_strict) for the clock's upper bound, or None if unbounded."""
        if self.empty:
            return None
        v = self.bounds[self.index(clock) * self.dim]
        return None if v == INF else (v >> 1, bool(v & 1))

    def lower(self, clock: str):
        if self.empty:
            return None
        v = self.bounds[self.index(clock)]
        return (-(v >> 1), bool(v & 1))

    def contains(self, valuation: dict) -> bool:
        if self.empty:
            return False
        n = self.dim
        vals = [0] + [valuation[c] for c in self.clocks]
        for i in range(n):
            for j in range(n):
                b = self.bounds[i * n + j]
                if b == INF:
                    continue
                diff = vals[i] - vals[j]
                c, nonstrict = b >> 1, b & 1
                if diff > c or (diff == c and not nonstrict):
                    return False
        return True

    def __le__(self, other: "Zone") -> bool:
        if self.empty:
            return True
        if other.empty:
            return False
        return _k.includes(other.bounds, self.bounds)

    def __str__(self) -> str:
        if self.empty:
            return "false"
        n = self.dim
        parts = []
        for i, c in enumerate(self.clocks, start=1):
            lo = -(self.bounds[i] >> 1)
            lo_op = ">=" if self.bounds[i] & 1 else ">"
            hi = self.bounds[i * n]
            s = f"{c} {lo_op} {lo}"
            if hi != INF:
                s += f" and {c} {'<=' if hi & 1 else '<'} {hi >> 1}"
            parts.append(s)
        for i in range(1, n):
            for j in range(1, n):
                if i != j and self.bounds[i * n + j] != INF:
                    b = self.bounds[i * n + j]
                    implied = add_bounds(self.bounds[i * n], self.bounds[j])
                    if b < implied:
                        parts.append(f"{self.clocks[i - 1]} - {self.clocks[j - 1]} {'<=' if b & 1 else '<'} {b >> 1}")
        return " and ".join(parts) if parts else "true"


def add_bounds(a, b):
    return dbm.python_kernel.add(a, b)


def zone_canon(z: Zone) -> Zone:
    if z.empty:
        return z
    return z._wrap(_k.canonical(list(z.bounds), z.dim))


def zone_empty(z: Zone) -> bool:
    return z.empty


def zone_constrain(z: Zone, i: int, j: int, bound: int) -> Zone:
    """Intersect with ``x_i - x_j <= bound`` (encoded)."""
    if z.empty:
        return z
    return z._wrap(_k.constrain(z.bounds, z.dim, i, j, bound))


def zone_and(z: Zone, cc) -> Zone:
    """Intersect with a clock constraint (an iterable of ``(clock, op, int)``)."""
    for clock, op, c in cc:
        if z.empty:
            return z
        i = z.index(clock)
        if op == "<=":
            z = zone_constrain(z, i, 0, le(c))
        elif op == ">=":
            z = zone_constrain(z, 0, i, le(-c))
        elif op == "<":
            z = zone_constrain(z, i, 0, lt(c))
        elif op == ">":
            z = zone_constrain(z, 0, i, lt(-c))
        else:
            raise ValueError(f"unknown comparison {op!r}")
    return z


def zone_up(z: Zone, inv=()) -> Zone:
    """Let time elapse, then restrict to the invariant ``inv``."""
    if z.empty:
        return z
    return zone_and(z._wrap(_k.up(z.bounds, z.dim)), inv)


def zone_reset(z: Zone, clocks: Iterable[str]) -> Zone:
    if z.empty:
        return z
    idx = [z.index(c) for c in clocks]
    return z._wrap(_k.reset(z.bounds, z.dim, idx))


def zone_extrapolate(z: Zone, max_constant: int) -> Zone:
    if z.empty:
        return z
    maxc = [0] + [max_constant] * len(z.clocks)
    return z._wrap(_k.extrapolate(z.bounds, z.dim, maxc))


def zone_integer_part(z: Zone) -> Zone:
    """Largest zone with only non-strict bounds holding the same integer points.

    Difference constraints with integer bounds are feasible over the
    integers iff feasible over the reals, so emptiness of the result decides
    whether ``z`` contains an integer valuation.
    """
    if z.empty:
        return z
    return z._wrap(_k.tighten_integer(z.bounds, z.dim))


def zone_subtract(z: Zone, cc) -> list[Zone]:
    """``z`` minus the clock constraint ``cc``, as a list of disjoint zones."""
    if z.empty:
        return []
    negate = {"<=": ">", ">=": "<", "<": ">=", ">": "<="}
    out = []
    rest = z
    for clock, op, c in cc:
        piece = zone_and(rest, [(clock, negate[op], c)])
        if not piece.empty:
            out.append(piece)
        rest = zone_and(rest, [(clock, op, c)])
        if rest.empty:
            break
    return out
