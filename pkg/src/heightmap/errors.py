"""Exception hierarchy shared by the library and the command line front end."""


class HeightMapError(Exception):
    """Base class for every error raised by this package."""


class EmptyBoxError(HeightMapError, ValueError):
    """An observation box is empty on some axis."""

    def __init__(self, index, axis, message=None):
        self.index = index
        self.axis = axis
        super().__init__(message or f"box {index} is empty on axis {axis}")


class InvalidBoxError(HeightMapError, ValueError):
    """Malformed observation box (misplaced infinity, inconsistent dimension, ...)."""


class NonCanonicalError(HeightMapError, ValueError):
    """Input to a sweep is not a canonical dataset."""


class OracleSizeError(HeightMapError, ValueError):
    """The brute-force oracle refuses an instance that is too large to enumerate."""

    def __init__(self, n, d, cells, limit):
        self.n = n
        self.d = d
        self.cells = cells
        self.limit = limit
        super().__init__(
            f"oracle refuses n={n}, d={d}: (2n)^d = {cells} cells exceeds the bound of {limit}"
        )


class ParseError(HeightMapError, ValueError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class BoxValidationError(HeightMapError, ValueError):
    """A parsed box fails validation; carries the file line and box index."""

    def __init__(self, message, line=None, index=None, path=None):
        self.line = line
        self.index = index
        self.path = path
        where = f"{path}:" if path is not None else ""
        where += f"{line}: " if line is not None else (" " if where else "")
        super().__init__(f"{where}{message}")
