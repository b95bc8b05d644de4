"""Exception hierarchy shared by every portalkit layer.

Every error carries a stable ``code`` string so the HTTP gateway and the
CLI can map failures to wire-level error bodies without string matching
on messages.
"""

from __future__ import annotations


class PortalError(Exception):
    """Base class for all portalkit failures."""

    code = "PortalError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# -- object model ------------------------------------------------------------

class UnknownRef(PortalError):
    """An identifier does not resolve in the current store."""

    code = "UnknownRef"


class TypeMismatch(PortalError):
    """An individual lies outside the range the operation requires."""

    code = "TypeMismatch"


class NoWitness(PortalError):
    """An identifying predicate matched nothing."""

    code = "NoWitness"


class AmbiguousIdentity(PortalError):
    """An identifying predicate matched more than one individual."""

    code = "AmbiguousIdentity"


# -- assignment calculus -----------------------------------------------------

class OutsideDomain(PortalError):
    """Application of a mapping to an element outside its domain."""

    code = "OutsideDomain"


class UnknownPoint(PortalError):
    """An assignment point with no matching case and no constant fallback."""

    code = "UnknownPoint"


class EmptyCarrier(PortalError):
    """Attempted to lift a predicate over an empty carrier."""

    code = "EmptyCarrier"


class LevelMismatch(PortalError):
    """Classification applied to an object of the wrong metadata level."""

    code = "LevelMismatch"


# -- sources -----------------------------------------------------------------

class DuplicateId(PortalError):
    code = "DuplicateId"


class UnreadableLocation(PortalError):
    code = "UnreadableLocation"


class MissingKeyField(PortalError):
    code = "MissingKeyField"


class InvalidCategory(PortalError):
    code = "InvalidCategory"


class MissingSubcategory(PortalError):
    """Image assets must carry a subcategory; other media must not."""

    code = "MissingSubcategory"


# -- portal engine -----------------------------------------------------------

class UnknownNavigationPoint(PortalError):
    code = "UnknownNavigationPoint"


class UnboundSlot(PortalError):
    """A slot's binding target vanished between load and bind time."""

    code = "UnboundSlot"


class UnknownEvent(PortalError):
    """Event name outside the bundle's declared event vocabulary."""

    code = "UnknownEvent"


class OutOfOrderEvent(PortalError):
    """Update event applied with a sequence number other than last+1."""

    code = "OutOfOrderEvent"


# -- sessions ----------------------------------------------------------------

class SessionClosed(PortalError):
    """Access attempted through a session that has already ended."""

    code = "SessionClosed"


class AccessDenied(PortalError):
    """Open session whose grants do not cover the requested target."""

    code = "AccessDenied"


# -- gateway -----------------------------------------------------------------

class ParseError(PortalError):
    """Malformed bundle document or REPL expression."""

    code = "ParseError"


class UnknownName(PortalError):
    """REPL head symbol that names neither a functional nor a value."""

    code = "UnknownName"


class DanglingReference(PortalError):
    """Bundle cross-reference that does not resolve; names the section."""

    code = "DanglingReference"

    def __init__(self, section: str, offender: str, message: str = ""):
        self.section = section
        self.offender = offender
        super().__init__(message or f"{section}: unresolved reference {offender!r}")


class PortUnavailable(PortalError):
    code = "PortUnavailable"
