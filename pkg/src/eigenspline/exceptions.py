"""Shared exception types.

ConfigError marks invalid parameter combinations (CLI exit code 2),
NumericalError marks failures of the numerics themselves (exit code 3).
"""


class ConfigError(ValueError):
    """Raised for inconsistent or out-of-range configuration."""


class NumericalError(RuntimeError):
    """Raised when a solve or factorization fails numerically."""
