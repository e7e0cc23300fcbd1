"""Exception hierarchy shared across the library."""


class PidLabError(Exception):
    """Base class for all library errors."""


class NegativeMass(PidLabError):
    pass


class NotNormalized(PidLabError):
    pass


class UnknownVariable(PidLabError):
    pass


class OverlappingGroups(PidLabError):
    pass


class ShapeMismatch(PidLabError):
    pass


class PairingIncomplete(PidLabError):
    pass


class BracketFailure(PidLabError):
    pass


class InfeasibleSupport(PidLabError):
    pass


class InconsistentConstraints(PidLabError):
    pass


class ZeroProbabilityOutcome(PidLabError):
    pass


class InconsistentAnchor(PidLabError):
    pass


class NotFullSupport(PidLabError):
    pass


class DeltaOutOfRange(PidLabError):
    pass


class ParameterOutOfRange(PidLabError):
    pass


class ParseError(PidLabError):
    pass


class ValidationError(PidLabError):
    pass


class MeasureError(PidLabError):
    """Wraps a failure inside a measure computation, keeping diagnostics."""

    def __init__(self, measure_id, message, diagnostics=None):
        super().__init__(f"{measure_id}: {message}")
        self.measure_id = measure_id
        self.diagnostics = diagnostics or []
