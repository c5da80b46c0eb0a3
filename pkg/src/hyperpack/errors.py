class ParameterError(ValueError):
    """Rejected parameters or inputs (CLI exit code 3)."""


class CapExceeded(ParameterError):
    """An exhaustive or formula-derived size exceeds its configured cap."""


class ValidationError(Exception):
    """A produced object failed an independent validity check (CLI exit code 2)."""
