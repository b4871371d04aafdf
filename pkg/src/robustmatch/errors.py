"""Exception hierarchy shared by every module."""


class RobustMatchError(Exception):
    """Base class for all library errors."""


class InputError(RobustMatchError, ValueError):
    """Malformed input: bad ids, mismatched sizes, unparsable files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(RobustMatchError):
    """A documented precondition on an argument does not hold."""


class PreconditionError(ContractViolation):
    """The inputs fall outside the regime an algorithm is guaranteed for."""


class NotAMatchingError(RobustMatchError):
    """A combination of matchings failed to produce a perfect matching."""


class NoUniqueExtremumError(RobustMatchError):
    """A set handed to ``extremal`` has no dominance-least/greatest element."""


class InvariantViolation(RobustMatchError):
    """Something that must never happen did; indicates a bug or bad hypothesis."""


class SizeRefusal(RobustMatchError):
    """Exhaustive routine asked to run on an instance that is too large."""


class BoundaryThetaError(RobustMatchError):
    """Rounding threshold lands exactly on an interior interval boundary."""
