"""Semantic exception hierarchy.

Public functions raise these instead of bare ValueError so callers (and the
CLI exit-code mapping) can tell usage mistakes from violated mathematical
preconditions.
"""


class DeadZoneError(Exception):
    """Base error for this package."""


class UsageError(DeadZoneError, ValueError):
    """Malformed input: unparsable angle, graph literal, or coupling spec."""


class PreconditionError(DeadZoneError, ValueError):
    """An operation's mathematical precondition is violated."""


class GenericityError(PreconditionError):
    """Phase point is not generic (coincident phase differences)."""


class StructuralError(PreconditionError):
    """Target graph lacks a spanning diverging tree (no stable realization)."""


class ContainmentError(PreconditionError):
    """Target graph is not a subgraph of the structural coupling graph."""


class BoundaryError(PreconditionError):
    """Phase point is too close to a dead-zone boundary for an interior-only query."""


class CapacityError(DeadZoneError):
    """A bounded search (e.g. collision-free point placement) was exhausted."""


class ConsistencyError(DeadZoneError):
    """An internal cross-check failed (analytic vs finite-difference route)."""
