"""Exception hierarchy shared by every module of the package."""


class CssMaxsatError(Exception):
    """Base class for all package errors."""


class InvalidParameter(CssMaxsatError, ValueError):
    pass


class ParseError(CssMaxsatError, ValueError):
    pass


class CssViolation(CssMaxsatError):
    """Hx . Hz^T != 0; ``pair`` holds the offending (x_row, z_row)."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class RankMismatch(CssMaxsatError):
    pass


class DegenerateCode(CssMaxsatError, ValueError):
    pass


class InvalidResidual(CssMaxsatError, ValueError):
    pass


class InvalidCheck(CssMaxsatError, ValueError):
    pass


class InvalidPrior(CssMaxsatError, ValueError):
    pass


class UnsupportedWeight(CssMaxsatError, ValueError):
    pass


class WeightOverflow(CssMaxsatError, OverflowError):
    pass


class HardUnsat(CssMaxsatError):
    """The hard part of a formula has no model."""


class SolverTimeout(CssMaxsatError):
    pass


class ExternalSolverError(CssMaxsatError):
    """Base for failures of an external MaxSAT process."""

    def __init__(self, message, stderr=""):
        super().__init__(message)
        self.stderr = stderr


class ProcessFailure(ExternalSolverError):
    pass


class UnparsableOutput(ExternalSolverError):
    pass


class VerificationFailure(ExternalSolverError):
    pass


class DegenerateFit(CssMaxsatError, ValueError):
    pass


class NoCrossing(CssMaxsatError, ValueError):
    pass


class ConfigError(CssMaxsatError, ValueError):
    pass
