"""Exception hierarchy shared by all modules."""


class MilburnError(Exception):
    """Base class for every error raised by this package."""


class TruncationError(MilburnError):
    """A state carries too much population near the top of the Fock basis."""


class DimensionMismatch(MilburnError, ValueError):
    pass


class NotHermitian(MilburnError, ValueError):
    pass


class PlanOverflow(MilburnError):
    """The Poisson series would need more terms than the configured ceiling."""


class StepSizeUnderflow(MilburnError):
    pass


class UnknownMethod(MilburnError, ValueError):
    pass


class ConfigError(MilburnError):
    """Base class for configuration problems (CLI exit code 2)."""


class ParseError(ConfigError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ConfigError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
