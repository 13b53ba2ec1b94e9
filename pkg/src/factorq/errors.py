"""Shared exception types, grouped by how the CLI maps them to exit codes."""


class FactorqError(Exception):
    """Base class for all workbench errors."""


class ValidationError(FactorqError, ValueError):
    """A configuration value or argument violates an invariant."""


class DomainError(FactorqError, ValueError):
    """An input lies outside an operation's domain (bad step index, action, shape)."""


class StateError(FactorqError, RuntimeError):
    """An operation was called in an invalid state (e.g. stepping a finished episode)."""


class CapacityError(FactorqError, RuntimeError):
    """An exact enumeration would exceed the supported problem size."""


class InsufficientDataError(FactorqError, RuntimeError):
    """Not enough stored samples to satisfy a request (caller may skip)."""


class ParseError(FactorqError, ValueError):
    """A file could not be parsed. Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TrainingDivergedError(FactorqError, RuntimeError):
    """Training produced a non-finite loss or parameter."""
