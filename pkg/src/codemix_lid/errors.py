"""Exception types shared across the toolkit."""


class LidError(Exception):
    """Base class for every error raised by codemix_lid."""


class LibraryParseError(LidError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class LibraryValidationError(LidError):
    def __init__(self, violations):
        super().__init__("invalid phonetic library: " + "; ".join(violations))
        self.violations = list(violations)


class InvalidInputError(LidError, ValueError):
    pass


class SizingError(LidError, ValueError):
    pass


class DegenerateInputError(LidError, ValueError):
    pass


class ShapeError(LidError, ValueError):
    pass


class NumericError(LidError, ArithmeticError):
    def __init__(self, block, message="non-finite value"):
        super().__init__(f"{message} in {block}")
        self.block = block


class ModelFormatError(LidError):
    """Corrupt, truncated or version-incompatible model file."""


class SchemeMismatchError(LidError):
    pass
