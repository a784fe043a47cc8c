"""Exception hierarchy shared by the library and the command line."""


class ScsError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class LengthError(ScsError, ValueError):
    """A word is too short (or too long) for the requested operation."""


class DimensionError(ScsError, ValueError):
    """Measure / constraint set dimensions (alphabet, k) do not match."""


class SpecParseError(ScsError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class InfeasibleError(ScsError):
    """The constraint region (or a derived region) is empty."""

    exit_code = 3


class RateInfeasibleError(ScsError):
    """The requested rate p/q exceeds what the presentation supports."""

    exit_code = 4


class DecodeError(ScsError):
    exit_code = 5

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class EulerianError(ScsError):
    """A multigraph has no Eulerian cycle/path of the requested shape."""

    def __init__(self, message, vertex=None):
        self.vertex = vertex
        super().__init__(message)


class NotInLanguageError(ScsError, ValueError):
    """A prefix is not generated by the graph it must be completed in."""
