class ZeroFieldError(ValueError):
    """Base error for everything raised by the zerofield app."""


class ConfigurationError(ZeroFieldError):
    """Malformed system file, sequence file or gate spec."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f'line {line}, column {column}: {message}'
        super().__init__(message)


class PhysicsError(ZeroFieldError):
    """A physical precondition does not hold (zero coupling, bad axis, ...)."""
