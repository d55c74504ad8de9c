"""Exception hierarchy.

Each family carries the process exit code the CLI maps it to.
"""


class LithoflowError(Exception):
    exit_code = 1


class ValidationError(LithoflowError, ValueError):
    """Input data violates a documented precondition."""

    exit_code = 3


class ParseError(ValidationError):
    pass


class FormatError(ValidationError):
    pass


class RangeError(ValidationError):
    pass


class DegenerateInputError(ValidationError):
    """Input has no spread (zero variance, zero entropy, all-zero signal)."""


class ConfigurationError(LithoflowError, ValueError):
    exit_code = 2


class InfeasibleError(ConfigurationError):
    pass


class NumericError(LithoflowError, ArithmeticError):
    exit_code = 4
