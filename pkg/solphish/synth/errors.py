"""
Synthetic corpus errors.
"""

from ..errors import SolPhishError


class CorpusWriteError(SolPhishError):
    """A corpus file could not be written or read back."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")
