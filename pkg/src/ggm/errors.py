"""Exception types shared across the package."""


class GgmError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(GgmError, ValueError):
    """An argument violates a documented precondition."""


class NumericalError(GgmError, ArithmeticError):
    """A numerical operation failed (singular factor, diverging iterates)."""


class DegenerateInput(GgmError, ValueError):
    """Input is structurally valid but degenerate for the requested metric."""


class ConfigError(GgmError, ValueError):
    """An experiment configuration is inconsistent or incomplete."""


class ParseError(GgmError, ValueError):
    """A text input could not be parsed; carries the offending location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
