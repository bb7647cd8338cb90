"""
Base exception shared by every sub-package.
"""


class SolPhishError(Exception):
    """Root of all toolkit errors; the CLI maps these to exit code 1."""
