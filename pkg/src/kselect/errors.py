"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Bad arguments, malformed files, or dimension mismatches."""


class NumericalError(ArithmeticError):
    """An iterative routine failed to converge."""


class FileFormatError(InvalidInputError):
    """A parse failure in one of the text formats, located by path and line."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        self.message = message
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")
