"""Exception hierarchy.

Configuration problems (bad parameters, unknown ids) and input problems
(unreadable or incomplete data files) are kept apart because the command
line maps them to different exit statuses.
"""


class CodecSelectError(Exception):
    pass


class ConfigurationError(CodecSelectError, ValueError):
    pass


class ParameterError(ConfigurationError):
    """A numeric parameter is outside its admissible range."""


class InsufficientSamplesError(ConfigurationError):
    pass


class DomainError(CodecSelectError, ValueError):
    """Data violates a method's range assumption (e.g. a value outside [0, 1])."""


class InputError(CodecSelectError):
    pass


class IngestionError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BoundViolationError(CodecSelectError, ArithmeticError):
    """Confidence intervals are mutually inconsistent (a probability <= delta event)."""
