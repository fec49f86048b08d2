"""Abstract syntax for the spatial traffic-rule formula language."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


@dataclass(frozen=True)
class Var:
    """A variable reference, bound by ``exists``/``forall`` or by a valuation."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class CarId:
    """A concrete car identifier (capitalised in the concrete syntax)."""

    name: str

    def __str__(self):
        return self.name


CarRef = Union[Var, CarId]


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Size:
    car: CarRef

    def __str__(self):
        return f"size({self.car})"


@dataclass(frozen=True)
class ApproachDistance:
    """The snapshot's approach distance constant, written ``dc``."""

    def __str__(self):
        return "dc"


LengthExpr = Union[Const, Size, ApproachDistance]


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self):
        from .printer import pretty

        return pretty(self)

    def children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True, repr=False)
class TrueF(Formula):
    pass


@dataclass(frozen=True, repr=False)
class FalseF(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Free(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Cs(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Re(Formula):
    car: CarRef


@dataclass(frozen=True, repr=False)
class Sg(Formula):
    car: CarRef


@dataclass(frozen=True, repr=False)
class Pc(Formula):
    car: CarRef


@dataclass(frozen=True, repr=False)
class Pa(Formula):
    car: CarRef


@dataclass(frozen=True, repr=False)
class Ob(Formula):
    kind: str


@dataclass(frozen=True, repr=False)
class LengthGE(Formula):
    bound: LengthExpr

    def __post_init__(self):
        if isinstance(self.bound, Const) and self.bound.value < 0:
            raise ValueError("length bounds must be nonnegative")


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, repr=False)
class Chop(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, repr=False)
class Somewhere(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


ATOMS = (TrueF, FalseF, Free, Cs, Re, Sg, Pc, Pa, Ob, LengthGE)
CAR_ATOMS = (Re, Sg, Pc, Pa)

for _cls in (TrueF, FalseF, Free, Cs, Re, Sg, Pc, Pa, Ob, LengthGE, Not, And, Or, Chop, Somewhere, Exists, Forall):
    _cls.__repr__ = lambda self: f"<{type(self).__name__} {self}>"


def intern_formula(f: Formula, pool: dict) -> Formula:
    """Canonical instance of ``f`` from ``pool`` so equal subformulas share identity."""
    changes = {}
    for fld in dataclasses.fields(f):
        v = getattr(f, fld.name)
        if isinstance(v, Formula):
            w = intern_formula(v, pool)
            if w is not v:
                changes[fld.name] = w
    if changes:
        f = dataclasses.replace(f, **changes)
    return pool.setdefault(f, f)


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def free_variables(f: Formula) -> set[str]:
    """Variables occurring in ``f`` that no enclosing quantifier binds."""
    out: set[str] = set()

    def go(node: Formula, bound: frozenset):
        if isinstance(node, (Exists, Forall)):
            go(node.body, bound | {node.var})
            return
        refs = []
        if isinstance(node, CAR_ATOMS):
            refs.append(node.car)
        elif isinstance(node, LengthGE) and isinstance(node.bound, Size):
            refs.append(node.bound.car)
        for r in refs:
            if isinstance(r, Var) and r.name not in bound:
                out.add(r.name)
        for ch in node.children():
            go(ch, bound)

    go(f, frozenset())
    return out


def chop_depth(f: Formula) -> int:
    """Nesting depth of chops; ``<<f>>`` counts as two (it is ``true chop f chop true``)."""
    if isinstance(f, Chop):
        return 1 + max(chop_depth(f.left), chop_depth(f.right))
    if isinstance(f, Somewhere):
        return 2 + chop_depth(f.arg)
    return max((chop_depth(c) for c in f.children()), default=0)


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten a tree of ``And`` nodes, left to right."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def conj(*parts: Formula) -> Formula:
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def chop_chain(*parts: Formula) -> Formula:
    """Right-nested chop of ``parts``."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Chop(p, out)
    return out


def safe_gap_on_junction(car: str, somewhere: bool = True) -> Formula:
    """The safe-gap-on-crossing formula for ``car``.

    Reservation off the crossing, then free space off the crossing, then a
    free stretch on the crossing at least as long as the car.
    """
    ref = CarId(car) if car[:1].isupper() else Var(car)
    body = chop_chain(
        And(Re(ref), Not(Cs())),
        And(Free(), Not(Cs())),
        And(Sg(ref), Cs()),
    )
    return Somewhere(body) if somewhere else body
