"""Exception types raised across the package."""


class BrainMapError(Exception):
    """Base class for all package errors."""


class ZeroVector(BrainMapError, ValueError):
    """A vector with (numerically) zero norm was asked to be normalized."""


class DimensionMismatch(BrainMapError, ValueError):
    pass


class DomainError(BrainMapError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PatternShapeMismatch(BrainMapError, ValueError):
    pass


class ParseError(BrainMapError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LabelError(ParseError):
    pass


class MagicMismatch(BrainMapError, ValueError):
    pass


class TruncatedFile(BrainMapError, ValueError):
    pass


class NotConverged(BrainMapError, RuntimeWarning):
    """Coordinate descent hit ``max_iter``; issued as a warning."""


class AllReplicatesDegenerate(BrainMapError, RuntimeError):
    """Every bootstrap replicate produced an all-zero weight vector."""


class NoCoverage(BrainMapError, RuntimeError):
    """No sample was ever out-of-bag, so no prediction error can be estimated."""


class EmptyInput(BrainMapError, ValueError):
    pass
