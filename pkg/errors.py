"""Domain errors. Each class carries the stable error code used by the CLI."""

from fractions import Fraction
from typing import Optional, Tuple


class CircleMapError(Exception):
    code = "DOMAIN_ERROR"


class MapParseError(CircleMapError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, position: Optional[Tuple[int, int]] = None):
        self.position = position
        if position is not None:
            message = f"{message} (line {position[0]}, column {position[1]})"
        super().__init__(message)


class MapValidationError(CircleMapError, ValueError):
    code = "VALIDATION_ERROR"

    def __init__(self, reason: str, index: Optional[int] = None):
        self.reason = reason
        self.index = index
        prefix = f"index {index}: " if index is not None else ""
        super().__init__(f"{prefix}{reason}")


class NotMeasurePreservingError(CircleMapError):
    code = "NOT_MEASURE_PRESERVING"

    def __init__(self, witness: Fraction, branch_sum: Fraction):
        self.witness = witness
        self.branch_sum = branch_sum
        super().__init__(
            f"branch sum at y={witness} is {branch_sum}, expected 1")


class InvalidWindowError(CircleMapError, ValueError):
    code = "INVALID_WINDOW"


class EpsilonTooSmallError(CircleMapError):
    code = "EPSILON_TOO_SMALL"


class NoComponentError(CircleMapError):
    code = "NO_COMPONENT"


class PreconditionSlopeError(CircleMapError):
    code = "PRECONDITION_SLOPE"

    def __init__(self, min_slope: Fraction, required: Fraction = Fraction(2)):
        self.min_slope = min_slope
        super().__init__(
            f"minimal |slope| is {min_slope}, must be strictly greater than {required}")


class BudgetExceededError(CircleMapError):
    code = "BUDGET_EXCEEDED"

    def __init__(self, depth: int, components: int, budget: int):
        self.depth = depth
        self.components = components
        super().__init__(
            f"{components} preimage components at depth {depth} exceed the budget of {budget}")


class InternalCheckError(CircleMapError):
    code = "INTERNAL_ERROR"
