"""Domain-specific exceptions for network ingestion and model fitting."""

from __future__ import annotations

from pathlib import Path


class SBTMError(Exception):
    """Base exception for every failure raised by greedy_sbtm."""

    pass


class InputError(SBTMError):
    """Raised when an input file is malformed."""

    def __init__(self, message: str, path: str | Path | None = None, line_number: int | None = None):
        self.path = None if path is None else Path(path)
        self.line_number = line_number
        location = ""
        if self.path is not None:
            location = f"{self.path}"
            if line_number is not None:
                location += f":{line_number}"
            location += ": "
        super().__init__(f"{location}{message}")


class ArgumentError(SBTMError, ValueError):
    """Raised when a function receives an invalid argument value."""

    pass


class ConsistencyError(SBTMError):
    """Raised when an allocation disagrees with node activity, or a move breaks label rules."""

    pass
