"""Assignment calculus: curried narrowing of generalized values,
finite-mapping evaluation, set comprehension and the metadata tower.

A generalized value is a value that is not yet unique: a finite case
table keyed by assignment points.  Applying an assignment (a set of
points) narrows the table; once a single case survives, the result is
that case's value, and further applications leave it unchanged
(saturation).  A constant table collapses to its constant under any
assignment at all.

The metadata tower stacks predicate characters: a level-(j+1) character
classifies level-j objects exactly where its defining predicate holds.
Level 0 is the data itself.  Characters are ordinary attribute-bearing
objects, so comprehension and classification apply to them the same way
they apply to data: the suite that holds at level 0 holds one level up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Union

from .errors import EmptyCarrier, LevelMismatch, OutsideDomain, UnknownPoint
from .predicates import Atomic, Predicate

Value = Union[Atomic, "GeneralizedValue"]


@dataclass
class GeneralizedValue:
    """A finite case table over assignment points."""

    id: str
    cases: dict[str, Value]
    description: str = ""

    def is_constant(self) -> bool:
        values = list(self.cases.values())
        return all(v == values[0] for v in values[1:])

    def points(self) -> set[str]:
        out = set(self.cases)
        for v in self.cases.values():
            if isinstance(v, GeneralizedValue):
                out |= v.points()
        return out


@dataclass
class Mapping:
    """A finite function between two domains, given by its graph."""

    domain: str
    codomain: str
    graph: dict[str, str]


def eval_pair(f: Mapping, x: str) -> str:
    """Apply a finite mapping to an element of its domain."""
    if x not in f.graph:
        raise OutsideDomain(f"{x!r} outside domain {f.domain} of the mapping")
    return f.graph[x]


def apply_assignment(g: Value, points: Iterable[str]) -> Value:
    """Narrow ``g`` by an assignment point set.

    Already-specific (atomic) values are returned unchanged: assignments
    saturate.  If the surviving cases agree on a single value the result
    is that value (this covers one-case survival and constant tables
    alike); several distinct survivors yield a narrowed generalized
    value.  A constant table answers its constant for any point set;
    otherwise a set matching no case raises ``UnknownPoint``.
    """
    point_set = set(points)
    if not point_set:
        raise UnknownPoint("empty assignment set")
    if not isinstance(g, GeneralizedValue):
        return g
    surviving = {p: v for p, v in g.cases.items() if p in point_set}
    if not surviving:
        if g.is_constant():
            return next(iter(g.cases.values()))
        raise UnknownPoint(
            f"{g.id}: no case for any of {sorted(point_set)!r}"
        )
    values = list(surviving.values())
    if all(v == values[0] for v in values[1:]):
        return values[0]
    return GeneralizedValue(id=g.id, cases=surviving, description=g.description)


def comprehend(members: Iterable[Any], pred: Predicate) -> list:
    """Set comprehension: the members on which ``pred`` holds, in order."""
    return [m for m in members if pred.holds(m)]


# -- metadata tower ------------------------------------------------------------


@dataclass
class MetaLevel:
    """One storey of the tower: a level number and its carrier objects."""

    level: int
    carrier: dict[str, Any] = field(default_factory=dict)

    def members(self) -> list:
        return list(self.carrier.values())


@dataclass
class PredicateCharacter:
    """A level-(j+1) object classifying the level-j carrier it was lifted from."""

    id: str
    level: int
    base: MetaLevel
    formula: Predicate

    def attr(self, name: str) -> Atomic:
        if name == "id":
            return self.id
        if name == "level":
            return self.level
        if name == "base_level":
            return self.base.level
        if name == "base_size":
            return len(self.base.carrier)
        return None


def object_level(x: Any) -> int:
    """Metadata level of a carrier object; plain data objects sit at 0."""
    if isinstance(x, PredicateCharacter):
        return x.level
    return 0


def lift_level(base: MetaLevel, pred: Predicate, char_id: str) -> PredicateCharacter:
    """Compress a predicate over a carrier into a one-level-up character."""
    if not base.carrier:
        raise EmptyCarrier(f"cannot lift over empty level-{base.level} carrier")
    return PredicateCharacter(
        id=char_id, level=base.level + 1, base=base, formula=pred
    )


def classify(z: PredicateCharacter, x: Any) -> bool:
    """Truth of the character's formula at ``x``.

    ``x`` must live in the character's base carrier, i.e. exactly one
    level below ``z``.
    """
    if object_level(x) != z.level - 1:
        raise LevelMismatch(
            f"{z.id} classifies level-{z.level - 1} objects, got level {object_level(x)}"
        )
    x_id = x.attr("id") if hasattr(x, "attr") else getattr(x, "id", None)
    if x_id not in z.base.carrier:
        raise LevelMismatch(f"{x_id!r} is not in the base carrier of {z.id}")
    return z.formula.holds(x)


class MetaRegistry:
    """The tower itself: level 0 is data, higher levels hold characters."""

    def __init__(self) -> None:
        self._levels: dict[int, MetaLevel] = {0: MetaLevel(0)}

    def level(self, j: int) -> MetaLevel:
        if j not in self._levels:
            self._levels[j] = MetaLevel(j)
        return self._levels[j]

    def register(self, obj_id: str, obj: Any, level: int = 0) -> None:
        self.level(level).carrier[obj_id] = obj

    def lookup(self, level: int, obj_id: str) -> Any:
        return self._levels.get(level, MetaLevel(level)).carrier.get(obj_id)

    def lift(self, level: int, pred: Predicate, char_id: str) -> PredicateCharacter:
        """Lift a predicate over level ``level`` and register the character."""
        char = lift_level(self.level(level), pred, char_id)
        self.register(char.id, char, char.level)
        return char
