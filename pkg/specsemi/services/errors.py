from typing import Any, Optional, Tuple


class SpecSemiError(Exception):
    """Base class for every error raised by the services package."""

    exit_code = 1


class StructuralError(SpecSemiError, ValueError):
    """Malformed tables, out-of-range indices or unreadable files."""

    exit_code = 1


class AxiomError(SpecSemiError):
    """A structure was well formed but failed its axioms."""

    exit_code = 2

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class PreconditionError(SpecSemiError):
    """An operation was called on inputs outside its domain."""

    exit_code = 2

    def __init__(self, message: str, witness: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.witness = witness


class BudgetExceededError(SpecSemiError):
    """Enumeration or construction would exceed a configured guard."""

    exit_code = 3


class InvariantViolation(SpecSemiError):
    """A property the theory guarantees failed at runtime."""

    exit_code = 2
