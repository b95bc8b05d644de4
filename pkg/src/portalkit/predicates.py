"""Closed predicate expressions over named attributes.

This is the one filter language used everywhere a membership test is
needed: sort variables, set comprehension, metadata characters, source
queries and script guards.  Connectives are equality, inequality,
membership, conjunction, disjunction and negation; that is deliberately
the whole language.

Predicates evaluate against any object that exposes attributes, via
:func:`attr_of`: domain objects implement ``attr(name)``, plain dicts
are read directly, everything else falls back to ``getattr``.  A missing
attribute reads as ``None``, which keeps every predicate total over any
carrier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

Atomic = Union[str, int, float, bool, None]


def attr_of(obj: Any, name: str) -> Atomic:
    """Read attribute ``name`` from an arbitrary carrier object."""
    reader = getattr(obj, "attr", None)
    if callable(reader):
        return reader(name)
    if isinstance(obj, dict):
        return obj.get(name)
    return getattr(obj, name, None)


class Predicate:
    """Base class; subclasses are immutable expression nodes."""

    def holds(self, obj: Any) -> bool:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Always(Predicate):
    def holds(self, obj: Any) -> bool:
        return True

    def to_json(self) -> dict:
        return {"op": "true"}


@dataclass(frozen=True)
class Never(Predicate):
    def holds(self, obj: Any) -> bool:
        return False

    def to_json(self) -> dict:
        return {"op": "false"}


@dataclass(frozen=True)
class Eq(Predicate):
    attr: str
    value: Atomic

    def holds(self, obj: Any) -> bool:
        return attr_of(obj, self.attr) == self.value

    def to_json(self) -> dict:
        return {"op": "eq", "attr": self.attr, "value": self.value}


@dataclass(frozen=True)
class Ne(Predicate):
    attr: str
    value: Atomic

    def holds(self, obj: Any) -> bool:
        return attr_of(obj, self.attr) != self.value

    def to_json(self) -> dict:
        return {"op": "ne", "attr": self.attr, "value": self.value}


@dataclass(frozen=True)
class In(Predicate):
    attr: str
    values: tuple

    def holds(self, obj: Any) -> bool:
        return attr_of(obj, self.attr) in self.values

    def to_json(self) -> dict:
        return {"op": "in", "attr": self.attr, "values": list(self.values)}


@dataclass(frozen=True)
class And(Predicate):
    parts: tuple

    def holds(self, obj: Any) -> bool:
        return all(p.holds(obj) for p in self.parts)

    def to_json(self) -> dict:
        return {"op": "and", "args": [p.to_json() for p in self.parts]}


@dataclass(frozen=True)
class Or(Predicate):
    parts: tuple

    def holds(self, obj: Any) -> bool:
        return any(p.holds(obj) for p in self.parts)

    def to_json(self) -> dict:
        return {"op": "or", "args": [p.to_json() for p in self.parts]}


@dataclass(frozen=True)
class Not(Predicate):
    part: Predicate

    def holds(self, obj: Any) -> bool:
        return not self.part.holds(obj)

    def to_json(self) -> dict:
        return {"op": "not", "arg": self.part.to_json()}


def conj(*parts: Predicate) -> Predicate:
    return And(tuple(parts))


def disj(*parts: Predicate) -> Predicate:
    return Or(tuple(parts))


_ATOMIC_TYPES = (str, int, float, bool, type(None))


def _check_atomic(value: Any, where: str) -> Atomic:
    if not isinstance(value, _ATOMIC_TYPES):
        raise ValueError(f"non-atomic literal in predicate {where}: {value!r}")
    return value


def predicate_from_json(doc: Any) -> Predicate:
    """Parse the wire form of a predicate.  Raises ``ValueError`` on shape errors."""
    if not isinstance(doc, dict) or "op" not in doc:
        raise ValueError(f"predicate node must be an object with 'op': {doc!r}")
    op = doc["op"]
    if op == "true":
        return Always()
    if op == "false":
        return Never()
    if op == "eq":
        return Eq(doc["attr"], _check_atomic(doc.get("value"), "eq"))
    if op == "ne":
        return Ne(doc["attr"], _check_atomic(doc.get("value"), "ne"))
    if op == "in":
        values = doc.get("values", [])
        if not isinstance(values, list):
            raise ValueError("'in' needs a list of values")
        return In(doc["attr"], tuple(_check_atomic(v, "in") for v in values))
    if op == "and":
        return And(tuple(predicate_from_json(a) for a in doc.get("args", [])))
    if op == "or":
        return Or(tuple(predicate_from_json(a) for a in doc.get("args", [])))
    if op == "not":
        return Not(predicate_from_json(doc["arg"]))
    raise ValueError(f"unknown predicate op {op!r}")
