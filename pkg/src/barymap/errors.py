"""Exception types shared across the package.

Everything raised for bad *input data* derives from DataError so the CLI can
map it to a single exit code; programming-contract violations raise plain
ValueError/TypeError as usual.
"""

from __future__ import annotations


class DataError(ValueError):
    """Input data violates a documented contract."""


class PajekParseError(DataError):
    """Malformed Pajek project file; message carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(DataError):
    """A map or similarity matrix failed validation."""


class ProfileError(DataError):
    """A publication profile or profile CSV is invalid."""
