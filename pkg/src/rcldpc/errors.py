"""Exception hierarchy shared by all rcldpc modules."""

from __future__ import annotations


class RcldpcError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(RcldpcError, ValueError):
    pass


class LengthMismatch(RcldpcError, ValueError):
    pass


class SingularMatrix(RcldpcError, ValueError):
    pass


class ParseError(RcldpcError, ValueError):
    """Malformed alist (or sidecar) text. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndexOutOfRange(ParseError):
    pass


class UnsupportedFamily(RcldpcError, ValueError):
    pass


class BadDimensions(RcldpcError, ValueError):
    pass


class NoCandidateCheck(RcldpcError, RuntimeError):
    pass


class InsufficientData(RcldpcError, ValueError):
    pass


class ConfigError(RcldpcError, ValueError):
    pass
