"""Exception taxonomy shared across the library.

The CLI maps these onto exit codes: invalid input -> 2, planning failure
(handled as a result value, not an exception) -> 1, internal invariant
violations -> 3.
"""


class GridplanError(Exception):
    """Base class for all library errors."""


class InvalidInputError(GridplanError, ValueError):
    """Caller-supplied parameters violate a documented precondition."""


class InvalidProblemError(GridplanError, ValueError):
    """A planning problem is malformed (e.g. start or goal in collision)."""


class InternalInvariantError(GridplanError, RuntimeError):
    """A library-internal invariant failed; indicates a bug, not bad input."""
