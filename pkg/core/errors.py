# core/errors.py
"""
Exception hierarchy shared by the library and the command layer.
"""

from typing import Optional


class SteinbergError(Exception):
    """Base class for every error raised by the toolkit."""


class CapacityError(SteinbergError):
    """A construction would exceed its configured size bound."""

    def __init__(self, what: str, estimated: int, limit: int):
        self.what = what
        self.estimated = int(estimated)
        self.limit = int(limit)
        super().__init__(
            f"{what}: estimated size {self.estimated} exceeds capacity {self.limit}"
        )


class UnsupportedRingError(SteinbergError):
    """The operation needs a field (or the integers) and got something else."""


class DimensionMismatchError(SteinbergError):
    """Matrix or vector shapes do not fit together."""


class InvalidInputError(SteinbergError):
    """Malformed parameters: unknown family, level out of range, zero column."""


class NotACycleError(SteinbergError):
    """A chain is not a cycle in the Steinberg submodule."""


class BasisExtractionError(SteinbergError):
    """Apartment classes failed to give a basis of the top homology."""


class TheoremViolation(SteinbergError):
    """A checked statement failed on explicit data."""

    def __init__(self, statement: str, detail: Optional[str] = None):
        self.statement = statement
        self.detail = detail
        message = statement if not detail else f"{statement}: {detail}"
        super().__init__(message)


class UnknownSuiteError(SteinbergError):
    """The requested verification suite does not exist."""
