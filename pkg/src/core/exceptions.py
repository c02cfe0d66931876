"""
Error taxonomy of the compiler.

Every error carries the process exit code the command line reports for it:
2 for unreadable input, 3 for violated preconditions, 4 for failed
verification.
"""
from typing import Any, Dict, Optional


class FlagCompilerError(Exception):
    """Base class for all compiler errors."""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{self.message} ({extra})"


class InputError(FlagCompilerError):
    exit_code = 2


class ParseError(InputError):
    """Malformed document; `field` and `position` locate the problem."""

    def __init__(self, message: str, field: Optional[str] = None,
                 position: Optional[str] = None, **details: Any):
        if field is not None:
            details["field"] = field
        if position is not None:
            details["position"] = position
        super().__init__(message, **details)
        self.field = field
        self.position = position


class UnsupportedRange(InputError):
    pass


class PreconditionError(FlagCompilerError):
    exit_code = 3


class NonUnitaryInput(PreconditionError):
    pass


class NotSymmetric(PreconditionError):
    pass


class NotIsometry(PreconditionError):
    pass


class WidthExceeded(PreconditionError):
    pass


class SizeExceeded(PreconditionError):
    pass


class ChiTooSmall(PreconditionError):
    pass


class IncompatibleEntangler(PreconditionError):
    pass


class NotLowered(PreconditionError):
    pass


class VerificationError(FlagCompilerError):
    exit_code = 4


class NumericalBreakdown(VerificationError):
    pass


class VerificationFailed(VerificationError):
    pass


class FormulaError(FlagCompilerError):
    """A closed-form count evaluated to a non-integer."""
