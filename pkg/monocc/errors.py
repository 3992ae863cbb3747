"""Error types raised across monocc.

Every error can render itself as a JSON-ready dict so the CLI can report it
as structured output instead of a traceback.
"""

from typing import Any


class MonoccError(Exception):
    """Base class for all monocc errors."""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        """Return the error as a JSON-serializable dict."""
        return {"error": type(self).__name__, "message": self.message, **self.context}


class InvalidArgumentError(MonoccError, ValueError):
    """An operation was called outside its preconditions."""


class BehindCameraError(InvalidArgumentError):
    """A point with non-positive depth was projected."""


class ConfigError(InvalidArgumentError):
    """A run configuration field is missing, unknown or out of range."""


class EmptySupportError(MonoccError, ValueError):
    """A loss or metric has no pixels / voxels to average over."""


class NumericFailureError(MonoccError, ArithmeticError):
    """A computation produced NaN or diverged."""


class DescriptorParseError(MonoccError, ValueError):
    """A scene descriptor could not be parsed.

    Args:
        message: Human readable description.
        field: Dotted path of the offending field (e.g. ``primitives[2].radius``).
        line: Line number for JSON syntax errors.
        column: Column number for JSON syntax errors.
    """

    def __init__(
        self,
        message: str,
        field: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        context: dict[str, Any] = {}
        if field is not None:
            context["field"] = field
        if line is not None:
            context["line"] = line
            context["column"] = column
        super().__init__(message, **context)
        self.field = field
        self.line = line
        self.column = column


class FormatError(MonoccError, ValueError):
    """A raster, voxel or grid file is malformed."""


__all__ = [
    "MonoccError",
    "InvalidArgumentError",
    "BehindCameraError",
    "ConfigError",
    "EmptySupportError",
    "NumericFailureError",
    "DescriptorParseError",
    "FormatError",
]
