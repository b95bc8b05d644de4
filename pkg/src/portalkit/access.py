"""Profile evaluation and session-scoped access grants.

A profile functional starts from a base class of users (typically
everyone) and is narrowed by a chain of assignment sets: each set keeps
exactly the users matching every point in it, where a user matches a
point that appears among their settings, status, device or browser
points.  Narrowing only ever shrinks the set, and an assignment that
does not discriminate the current set leaves it unchanged.

Sessions pin down access: grants are computed from the user's role when
the session opens and become unusable the moment it ends.  Read scope
grows with role rank; write scope is per-area and deliberately not
ordered across roles.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import SessionClosed, UnknownPoint, UnknownRef

Target = Union[str, int]  # source id, or metadata level
Grant = tuple[Target, str]  # (target, "read" | "write")

STATUSES = ("registered", "unregistered", "corporate")


@dataclass
class UserRecord:
    id: str
    settings: set[str] = field(default_factory=set)
    status: str = "unregistered"
    device: str = ""
    browser: set[str] = field(default_factory=set)
    role: str = "ordinary"

    def points(self) -> set[str]:
        return self.settings | self.browser | ({self.status, self.device} - {""})

    def matches(self, point: str) -> bool:
        return point in self.points()


@dataclass
class RoleScope:
    read_sources: set[str] = field(default_factory=set)
    write_sources: set[str] = field(default_factory=set)
    meta_read_cap: int = 0
    meta_write_cap: int = -1


@dataclass
class Role:
    id: str
    rank: int
    scope: RoleScope = field(default_factory=RoleScope)


@dataclass
class ProfileFunctional:
    """A user class to be narrowed; ``base`` lists member user ids."""

    id: str
    base: list[str]


@dataclass(frozen=True)
class AccessView:
    """What slot elision needs to know about a viewer."""

    rank: int
    registered: bool


@dataclass
class Session:
    id: str
    user: str
    grants: frozenset[Grant]
    view: AccessView
    open: bool = True


class AccessControl:
    """User, role and functional registry plus the live session table.

    Session mutation is serialized; profile evaluation and access checks
    are pure reads.
    """

    def __init__(self) -> None:
        self.users: dict[str, UserRecord] = {}
        self.roles: dict[str, Role] = {}
        self.functionals: dict[str, ProfileFunctional] = {}
        self.sessions: dict[str, Session] = {}
        self.point_vocabulary: set[str] = set(STATUSES)
        self._counter = 0
        self._lock = threading.Lock()

    # -- registration ----------------------------------------------------------

    def add_role(self, role: Role) -> None:
        self.roles[role.id] = role

    def add_user(self, user: UserRecord) -> None:
        if user.role not in self.roles:
            raise UnknownRef(f"user {user.id}: unknown role {user.role}")
        self.users[user.id] = user
        self.point_vocabulary |= user.points()

    def add_functional(self, functional: ProfileFunctional) -> None:
        for uid in functional.base:
            if uid not in self.users:
                raise UnknownRef(f"functional {functional.id}: unknown user {uid}")
        self.functionals[functional.id] = functional

    # -- profile evaluation ------------------------------------------------------

    def evaluate_profile(
        self, functional: ProfileFunctional, chain: Sequence[Iterable[str]]
    ) -> list[str]:
        """Narrow the functional's base by each assignment set in turn."""
        current = list(functional.base)
        for assignment in chain:
            points = set(assignment)
            unknown = points - self.point_vocabulary
            if unknown:
                raise UnknownPoint(f"unknown assignment point(s) {sorted(unknown)}")
            current = [
                uid
                for uid in current
                if all(self.users[uid].matches(p) for p in points)
            ]
        return current

    # -- sessions -----------------------------------------------------------------

    def _grants_for(self, role: Role, known_sources: set[str]) -> frozenset[Grant]:
        grants: set[Grant] = set()
        for src in role.scope.read_sources & known_sources:
            grants.add((src, "read"))
        for src in role.scope.write_sources & known_sources:
            grants.add((src, "write"))
        for level in range(role.scope.meta_read_cap + 1):
            grants.add((level, "read"))
        for level in range(role.scope.meta_write_cap + 1):
            grants.add((level, "write"))
        return frozenset(grants)

    def open_session(self, user_id: str, known_sources: set[str]) -> Session:
        """Open a session; grants derive from the user's role right now."""
        user = self.users.get(user_id)
        if user is None:
            raise UnknownRef(f"unknown user {user_id}")
        role = self.roles[user.role]
        with self._lock:
            self._counter += 1
            session = Session(
                id=f"s{self._counter}",
                user=user_id,
                grants=self._grants_for(role, known_sources),
                view=AccessView(rank=role.rank, registered=user.status != "unregistered"),
            )
            self.sessions[session.id] = session
        return session

    def end_session(self, session_id: str) -> bool:
        """Close a session; returns whether it was open.  Idempotent."""
        with self._lock:
            session = self.sessions.get(session_id)
            if session is None or not session.open:
                return False
            session.open = False
            return True

    def session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownRef(f"unknown session {session_id}")
        return session

    def live_session(self, session_id: str) -> Session:
        session = self.session(session_id)
        if not session.open:
            raise SessionClosed(f"session {session_id} has ended")
        return session

    def check_access(self, session_id: str, target: Target, mode: str) -> bool:
        """True iff the session is open and (target, mode) is granted."""
        session = self.live_session(session_id)
        return (target, mode) in session.grants
