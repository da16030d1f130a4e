"""Exception types shared across the package."""
from __future__ import annotations


class DimensionError(ValueError):
    def __init__(self, message: str, *sizes):
        super().__init__(message)
        self.sizes = sizes


class SingularMatrixError(ArithmeticError):
    """Raised on an exact zero pivot or a float pivot below the absolute floor.

    ``subset`` names the offending vectors when the caller knows them.
    """

    def __init__(self, message: str, subset: tuple[int, ...] | None = None):
        super().__init__(message)
        self.subset = subset


class InvalidInputError(ValueError):
    pass


class CapacityError(ValueError):
    pass


class VerificationError(AssertionError):
    """Two routes to the same quantity disagreed."""


class DegeneracyError(ArithmeticError):
    pass


class HorizonError(IndexError):
    pass


class FamilyFormatError(ValueError):
    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col
