"""Exception types raised across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Operands disagree on agent count or spatial dimension."""


class ParameterError(ValueError):
    """A numeric parameter is outside the range an operation accepts."""


class ConfigError(ValueError):
    """A configuration document failed to parse or validate.

    ``errors`` holds ``(line_number, message)`` pairs; the line number is
    ``None`` for problems that are not tied to a single line.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = []
        for lineno, msg in self.errors:
            lines.append(f"line {lineno}: {msg}" if lineno is not None else msg)
        super().__init__("\n".join(lines))
