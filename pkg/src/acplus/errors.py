"""Exception and warning types shared across the package.

Every exception carries a stable ``code`` string so the CLI can map
failures to exit codes and reports without parsing messages.
"""


class LabError(Exception):
    """Base class for all package errors."""

    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class ConfigError(LabError):
    """Bad configuration or violated precondition (CLI exit code 2)."""

    code = "PRECONDITION"


class NumericsError(LabError):
    """A numerical procedure failed to produce a usable result (CLI exit code 3)."""

    code = "NUMERICS"


class CflViolation(ConfigError):
    code = "CFL_VIOLATION"


class RampOutOfGrid(ConfigError):
    code = "RAMP_OUT_OF_GRID"


class NoEvent(NumericsError):
    code = "NO_EVENT"


class BracketInvalid(NumericsError):
    code = "BRACKET_INVALID"


class NoConvergence(NumericsError):
    code = "NO_CONVERGENCE"


class DivideNearZero(NumericsError):
    code = "DIVIDE_NEAR_ZERO"


class NoRootAlphaMu(NumericsError):
    code = "NO_ROOT_ALPHA_MU"


class NoAdmissibleDelta(NumericsError):
    code = "NO_ADMISSIBLE_DELTA"


class NoFreeBoundary(NumericsError):
    code = "NO_FREE_BOUNDARY"


class FrameOutOfGrid(ConfigError):
    code = "FRAME_OUT_OF_GRID"


class InsufficientData(NumericsError):
    code = "INSUFFICIENT_DATA"


class NoiseDominated(NumericsError):
    code = "NOISE_DOMINATED"


class BoundaryProximityWarning(UserWarning):
    """Front came within a few cells of the domain boundary; data may be contaminated."""


class MultimodalFitWarning(UserWarning):
    """Position fit found two competing local minima; shift may be ambiguous."""
