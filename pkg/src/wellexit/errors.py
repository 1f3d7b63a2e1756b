"""Shared exception roots. Concrete error types live next to their modules."""


class WellexitError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(WellexitError):
    """Invalid or malformed run configuration (CLI exit code 2)."""


class NumericalError(WellexitError):
    """A numerical procedure failed to produce a usable result (CLI exit code 3)."""
