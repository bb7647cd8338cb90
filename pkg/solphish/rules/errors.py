"""
Rule Input Errors
"""

from typing import Optional

from ..errors import SolPhishError


class ListFileError(SolPhishError):
    """A markets or allowlist file could not be parsed."""

    def __init__(self, path: str, reason: str, line: Optional[int] = None):
        self.path = path
        self.reason = reason
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {reason}")


class DetectionFormatError(SolPhishError):
    """A detections file line does not follow the detection schema."""

    def __init__(self, path: str, line: int, reason: str):
        self.path = path
        self.line = line
        self.reason = reason
        super().__init__(f"{path}:{line}: {reason}")
