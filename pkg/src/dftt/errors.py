"""Exception hierarchy.

Input errors (bad files, malformed sequences, bad arguments) map to CLI exit
code 1; domain errors (a quantity undefined for the given parameters) map to 2.
"""


class DftError(Exception):
    """Base class for all package errors."""


class InputError(DftError, ValueError):
    """The caller supplied unusable input."""


class ParseError(InputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at index {position}")
        self.position = position


class InputTooShortError(InputError):
    pass


class DomainError(DftError, ArithmeticError):
    """A closed form or statistic is undefined for the requested parameters."""
