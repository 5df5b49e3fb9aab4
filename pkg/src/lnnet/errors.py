"""Exception hierarchy shared by every module.

All errors derive from :class:`LnNetError` so callers (notably the CLI) can
map domain failures to a single exit code.
"""


class LnNetError(Exception):
    """Base class for every domain error raised by the package."""


class ShapeError(LnNetError, ValueError):
    pass


class DegenerateInputError(LnNetError, ValueError):
    """A normalization received (near) zero variance or a zero vector."""

    def __init__(self, message, layer=None):
        if layer is not None:
            message = f"layer {layer}: {message}"
        super().__init__(message)
        self.layer = layer


class SingularScatterError(LnNetError):
    pass


class NoDescentError(LnNetError):
    pass


class SearchFailureError(LnNetError):
    pass


class SeparationFailureError(LnNetError):
    pass


class ValidationError(LnNetError, ValueError):
    pass


class ParseError(LnNetError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AmbiguityError(LnNetError):
    pass


class UndefinedRatioError(LnNetError):
    pass
