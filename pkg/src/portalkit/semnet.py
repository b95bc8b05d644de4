"""Frame store for the dyadic semantic-network language.

The language is a pair of a relation vocabulary and a constant
vocabulary; its atoms are frames, triples of one relation and two
constants.  Evaluation is closed-world: a frame is true exactly when it
is in the store, computed by applying the relation's characteristic
mapping to the (subject, object) pair so that frame truth and mapping
application are one mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import UnknownRef

WILDCARD = "*"


@dataclass(frozen=True)
class Frame:
    rel: str
    subj: str
    obj: str


@dataclass
class Constant:
    """A constant symbol, bound to an individual id or to itself as an atom."""

    id: str
    binding: str


class FrameStore:
    """Insertion-ordered, duplicate-free set of frames with pattern queries."""

    def __init__(self) -> None:
        self.relations: dict[str, None] = {}
        self.constants: dict[str, Constant] = {}
        self._frames: dict[Frame, None] = {}

    def declare_relation(self, rel_id: str) -> None:
        self.relations[rel_id] = None

    def declare_constant(self, const: Constant) -> None:
        self.constants[const.id] = const

    def frames(self) -> list[Frame]:
        return list(self._frames)

    def __len__(self) -> int:
        return len(self._frames)

    def _check_ids(self, rel: Optional[str], subj: Optional[str], obj: Optional[str]) -> None:
        if rel is not None and rel not in self.relations:
            raise UnknownRef(f"unknown relation {rel}")
        for c in (subj, obj):
            if c is not None and c not in self.constants:
                raise UnknownRef(f"unknown constant {c}")

    def assert_frame(self, rel: str, subj: str, obj: str) -> Frame:
        """Add a frame; asserting an already-present frame is a no-op."""
        self._check_ids(rel, subj, obj)
        frame = Frame(rel, subj, obj)
        self._frames.setdefault(frame, None)
        return frame

    def retract_frame(self, frame: Frame) -> bool:
        """Remove a frame, reporting whether it was present."""
        return self._frames.pop(frame, WILDCARD) is not WILDCARD

    def query_frames(self, rel: Optional[str], subj: Optional[str], obj: Optional[str]) -> list[Frame]:
        """All frames matching the pattern; ``None`` (or ``"*"``) is a wildcard."""
        rel = None if rel == WILDCARD else rel
        subj = None if subj == WILDCARD else subj
        obj = None if obj == WILDCARD else obj
        self._check_ids(rel, subj, obj)
        return [
            f
            for f in self._frames
            if (rel is None or f.rel == rel)
            and (subj is None or f.subj == subj)
            and (obj is None or f.obj == obj)
        ]

    def characteristic(self, rel: str) -> dict[tuple[str, str], bool]:
        """The relation as a mapping from (subject, object) pairs to truth."""
        if rel not in self.relations:
            raise UnknownRef(f"unknown relation {rel}")
        return {(f.subj, f.obj): True for f in self._frames if f.rel == rel}

    def eval_frame(self, frame: Frame) -> bool:
        """Closed-world frame truth via the relation's characteristic mapping."""
        self._check_ids(frame.rel, frame.subj, frame.obj)
        return self.characteristic(frame.rel).get((frame.subj, frame.obj), False)
