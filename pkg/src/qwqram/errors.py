"""Exception hierarchy shared by every module."""


class QRAMError(Exception):
    """Base class for all errors raised by qwqram."""


class DomainError(QRAMError, ValueError):
    """An argument lies outside the domain of an operation."""


class ShapeError(DomainError):
    """Widths or ranges are inconsistent with the tree shape."""


class FormatError(QRAMError, ValueError):
    """Malformed text input.  ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceError(QRAMError):
    """A requested computation exceeds a configured size cap."""
