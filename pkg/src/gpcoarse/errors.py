"""Exception hierarchy shared across the package.

The CLI maps each class to a fixed exit code, so library code raises these
rather than returning sentinel values.
"""


class GPCoarseError(Exception):
    exit_code = 1


class InvalidElement(GPCoarseError, ValueError):
    """An element, syllable or word does not belong to the declared group."""

    exit_code = 2


class ParseError(GPCoarseError, ValueError):
    exit_code = 2

    def __init__(self, message, text="", position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position} in {text!r})"
        super().__init__(message)


class ConfigError(GPCoarseError, ValueError):
    exit_code = 2


class Refusal(GPCoarseError):
    """A builder declines an input it cannot certify (instead of guessing)."""

    exit_code = 3


class BudgetExceeded(GPCoarseError):
    """A search or enumeration went past its configured desk-scale limit."""

    exit_code = 4

    def __init__(self, message, budget=None):
        self.budget = budget
        super().__init__(message)


class VerificationFailure(GPCoarseError):
    exit_code = 5
