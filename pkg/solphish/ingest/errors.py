"""
Ingestion Errors
"""

from typing import Optional

from ..errors import SolPhishError


class IngestError(SolPhishError):
    """Base class for data-collection failures."""


class EndpointUnavailable(IngestError):
    """The RPC endpoint could not be reached after all retries."""

    def __init__(self, method: str, attempts: int, cause: str):
        self.method = method
        self.attempts = attempts
        super().__init__(f"{method} failed after {attempts} attempt(s): {cause}")


class RateLimited(IngestError):
    """The endpoint kept answering 429; retry_after is its hint in seconds."""

    def __init__(self, method: str, retry_after: Optional[float]):
        self.method = method
        self.retry_after = retry_after
        hint = f", retry after {retry_after:g}s" if retry_after is not None else ''
        super().__init__(f"{method} rate limited{hint}")


class RpcError(IngestError):
    """JSON-RPC error object returned by the endpoint."""

    def __init__(self, method: str, code: int, message: str):
        self.method = method
        self.code = code
        super().__init__(f"{method} returned RPC error {code}: {message}")


class NotFound(IngestError):
    """The endpoint does not know the requested signature."""

    def __init__(self, signature: str):
        self.signature = signature
        super().__init__(f"transaction {signature} not found")


class InvalidSignature(IngestError):
    """A transaction signature is not base58 text."""

    def __init__(self, signature: str):
        self.signature = signature
        super().__init__(f"not a base58 signature: {signature!r}")


class MalformedPayload(IngestError):
    """A raw payload does not have the expected shape; path names the JSON location."""

    def __init__(self, path: str, reason: str, line: Optional[int] = None):
        self.path = path
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ''
        super().__init__(f"{where}malformed payload at {path}: {reason}")

    def at_line(self, line: int) -> 'MalformedPayload':
        return MalformedPayload(self.path, self.reason, line)
