"""Error types raised by soficshift.

Every error is a ``ValueError`` so callers that only care about bad input can catch that.
``exit_code`` is what the command line returns when the error escapes a subcommand.
"""


class SoficShiftError(ValueError):
    exit_code = 2


# ---------------------------------------------------------------------------
# Input and format errors (exit code 2)
# ---------------------------------------------------------------------------
class GraphFormatError(SoficShiftError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class InvalidGraph(SoficShiftError):
    pass


class InvalidDag(SoficShiftError):
    pass


class PredSepRequiresEssential(SoficShiftError):
    pass


class EmptyAfterTrim(SoficShiftError):
    pass


class FreshSymbolClash(SoficShiftError):
    pass


class EmptyInducedAlphabet(SoficShiftError):
    pass


class AlphabetOverlap(SoficShiftError):
    pass


class GraphMismatch(SoficShiftError):
    pass


class InvalidRay(SoficShiftError):
    pass


class NotIrreducible(SoficShiftError):
    pass


class UnknownFixture(SoficShiftError):
    pass


# ---------------------------------------------------------------------------
# Resource caps (exit code 3)
# ---------------------------------------------------------------------------
class StateCapExceeded(SoficShiftError):
    exit_code = 3

    def __init__(self, what: str, cap: int):
        self.cap = cap
        super().__init__(f"{what} exceeded the cap of {cap}")


class CapExceeded(StateCapExceeded):
    pass


# ---------------------------------------------------------------------------
# Internal consistency failures (exit code 4)
# ---------------------------------------------------------------------------
class ConsistencyError(SoficShiftError):
    exit_code = 4


class NoCoverExists(ConsistencyError):
    pass
