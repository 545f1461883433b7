"""Exception hierarchy shared by every splitplan module."""


class SplitPlanError(Exception):
    """Base class for all splitplan errors."""


class InputError(SplitPlanError, ValueError):
    """Bad user-provided data. The CLI maps these to exit code 2."""


class LengthMismatch(InputError):
    pass


class NonPositiveEntry(InputError):
    pass


class ParseError(InputError):
    """A file could not be parsed; ``field`` names the offending key when known."""

    def __init__(self, message, field=None, path=None):
        self.field = field
        self.path = path
        parts = []
        if path is not None:
            parts.append(str(path))
        if field is not None:
            parts.append(f"field '{field}'")
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class InvariantViolation(InputError):
    """Parsed data breaks a documented invariant; the message names it."""

    def __init__(self, invariant, detail=None):
        self.invariant = invariant
        msg = invariant if detail is None else f"{invariant} ({detail})"
        super().__init__(msg)


class CutOutOfRange(InputError):
    pass


class ZeroShareWithNonzeroBody(InputError):
    pass


class EmptyScenario(InputError):
    pass


class TooManyClientsForOracle(InputError):
    pass


class NoSecondCandidate(InputError):
    pass


class InternalError(SplitPlanError, RuntimeError):
    """An internal invariant failed (e.g. bisection did not converge). Exit code 3."""


class InvalidPlan(InputError):
    pass
