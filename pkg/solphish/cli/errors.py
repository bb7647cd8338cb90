"""
Run Configuration Errors
"""

from ..errors import SolPhishError


class ConfigError(SolPhishError, ValueError):
    """A run configuration field is missing or invalid."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"config field {field!r}: {reason}")
