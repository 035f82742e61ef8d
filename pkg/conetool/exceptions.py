"""
Exception hierarchy shared by every conetool module.
"""

from typing import List, Optional, Sequence


class ConetoolError(Exception):
    """Base exception for conetool."""
    pass


# ============================================================================
# CONE ALGEBRA
# ============================================================================

class ConeError(ConetoolError):
    """Base exception for cone construction and cone algebra."""
    pass


class DimensionMismatch(ConeError):
    """Raised when vectors, matrices or cones of incompatible ranks are combined."""
    pass


class RepresentationMismatch(ConeError):
    """Raised when a caller-supplied generator/inequality pair disagree."""
    pass


class NotFullDimensional(ConeError):
    """Raised by operations that are only meaningful for full-dimensional cones."""
    pass


# ============================================================================
# GROUP ACTIONS
# ============================================================================

class ActionError(ConetoolError):
    """Base exception for group construction."""
    pass


class NotUnimodular(ActionError):
    """Raised when a generator is not an invertible integer matrix."""
    pass


class InvariantConeViolation(ActionError):
    """Raised when a generator does not map the asserted invariant cone into itself."""
    pass


class BudgetExceeded(ConetoolError):
    """Raised when an enumeration would exceed the configured element cap."""

    def __init__(self, message: str, cap: int, reached: int):
        super().__init__(message)
        self.cap = cap
        self.reached = reached


# ============================================================================
# CONTRACTS AND DATA
# ============================================================================

class DomainError(ConetoolError):
    """Raised when a point or cone lies outside the region an operation works on."""
    pass


class ContractError(ConetoolError):
    """Raised when an input violates the documented precondition of an operation."""
    pass


class MarkingError(ContractError):
    """Raised when a marking violates one of its invariants."""
    pass


class FaceValidationError(ContractError):
    """Raised when a cone asserted to be a face is not one."""
    pass


class DichotomyViolation(ConetoolError):
    """
    Raised when two chambers have overlapping interiors but different cones.

    This signals inconsistent scenario data: chambers coming from geometry
    are either equal or meet only along their boundaries.
    """

    def __init__(self, message: str, first: str, second: str, witness: Optional[Sequence] = None):
        super().__init__(message)
        self.first = first
        self.second = second
        self.witness = tuple(witness) if witness is not None else None


class ExceptionalSubconeViolation(ConetoolError):
    """Raised when a chamber stabilizer does not permute the exceptional rays."""

    def __init__(self, message: str, chamber_id: str, words: Sequence = ()):
        super().__init__(message)
        self.chamber_id = chamber_id
        self.words = list(words)


class ScenarioError(ConetoolError):
    """Raised when a scenario file fails to load; carries every problem found."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        summary = f"{len(self.errors)} scenario error(s)"
        if self.errors:
            summary += ":\n  " + "\n  ".join(self.errors)
        super().__init__(summary)
