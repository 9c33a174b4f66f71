"""Exception hierarchy shared by all modules."""


class HarnackLabError(Exception):
    """Base class for every error raised by harnacklab."""


class ShapeMismatchError(HarnackLabError, ValueError):
    """A field does not match the grid of the metric it is used with."""


class StepSizeError(HarnackLabError):
    """An explicit step violates the diffusion CFL bound."""


class BlowUpRangeError(HarnackLabError):
    """The requested time interval reaches a finite-time singularity."""


class TimeRangeError(HarnackLabError, ValueError):
    """A requested time lies outside the stored trajectory or solution."""


class PositivityError(HarnackLabError):
    """A solution that must stay positive lost positivity."""

    def __init__(self, message, index=None, tau=None, location=None):
        super().__init__(message)
        self.index = index
        self.tau = tau
        self.location = location


class UnknownPresetError(HarnackLabError, KeyError):
    pass


class CoefficientDomainError(HarnackLabError, ValueError):
    """Harnack coefficients are outside the domain of the requested formula."""


class ParameterMismatchError(HarnackLabError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class NoAdmissibleDError(HarnackLabError):
    pass


class ConfigError(HarnackLabError, ValueError):
    """Malformed scenario file."""
