"""Shared exception types, mapped to CLI exit codes in rearwarn.cli."""


class DataError(ValueError):
    """Malformed or inconsistent input data (CSV rows, episode invariants)."""


class ConfigError(ValueError):
    """Bad configuration value or unresolvable preset."""
