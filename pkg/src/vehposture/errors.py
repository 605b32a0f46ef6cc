"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""

from __future__ import annotations


class PostureError(ValueError):
    """Base class for all package errors."""


class InvalidSampleError(PostureError):
    """Non-finite or implausibly large acceleration component."""


class NonMonotonicTimestampError(PostureError):
    pass


class InvalidCutoffError(PostureError):
    pass


class InvalidConfigError(PostureError):
    """Detector configuration violates an invariant; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"invalid config: {field}: {message}")


class NoOverlapError(PostureError):
    pass


class AllGapsError(PostureError):
    pass


class EmptyResidualError(PostureError):
    pass


class InvalidSpecError(PostureError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"invalid scenario: {field}: {message}")


class OverlappingPickupsError(PostureError):
    pass


class MismatchedTimelinesError(PostureError):
    pass


class ParseError(PostureError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, line: int, message: str, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")


class FingerprintMismatchError(PostureError):
    pass
