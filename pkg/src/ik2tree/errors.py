"""Exception hierarchy shared by every module of the package."""


class IK2Error(Exception):
    """Base class for all errors raised by ik2tree."""


class InputError(IK2Error, ValueError):
    """Invalid user input: out-of-bounds ids, malformed patterns, bad ranges."""


class ParseError(InputError):
    """A text record could not be parsed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class NotFoundError(IK2Error, LookupError):
    """A select ordinal or term does not exist."""


class NavigationError(IK2Error):
    """A tree navigation step was requested on a node that has no children."""


class UnsupportedStrategyError(IK2Error):
    """The requested evaluation strategy cannot answer the pattern."""


class FormatError(IK2Error):
    """A serialized index is corrupt, truncated or of an unknown version."""
