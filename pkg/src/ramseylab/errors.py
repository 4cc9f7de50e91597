"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class RamseyLabError(Exception):
    code = "ERROR"


class InvalidInput(RamseyLabError, ValueError):
    code = "INVALID_INPUT"


class OddDimension(InvalidInput):
    code = "ODD_DIMENSION"


class SizeLimitExceeded(RamseyLabError):
    code = "SIZE_LIMIT"


class PreconditionFailed(RamseyLabError):
    code = "PRECONDITION_FAILED"


class ParameterError(RamseyLabError, ValueError):
    code = "PARAMETER_ERROR"


class NotFound(RamseyLabError):
    code = "NOT_FOUND"


class IncompatibleOverlap(RamseyLabError):
    code = "INCOMPATIBLE_OVERLAP"


class InfeasiblePattern(RamseyLabError):
    code = "INFEASIBLE_PATTERN"


class NotFree(RamseyLabError):
    code = "NOT_FREE"


class NoMatchingRow(RamseyLabError):
    code = "NO_MATCHING_ROW"


class PartialColoring(RamseyLabError):
    code = "PARTIAL_COLORING"


class VerificationFailed(RamseyLabError):
    code = "VERIFICATION_FAILED"
