"""
Ingestion Configuration
"""

from dataclasses import asdict, dataclass
from typing import Dict

DEFAULT_MAX_IN_FLIGHT = 8
DEFAULT_RETRY_LIMIT = 3
DEFAULT_BACKOFF_BASE_MS = 250
# getSignaturesForAddress caps a page at 1000
MAX_SIGNATURE_PAGE = 1000


@dataclass
class IngestConfig:
    """
    Settings for the JSON-RPC data collection.

    The defaults keep well inside public endpoint rate limits.
    """
    endpoint_url: str
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT
    retry_limit: int = DEFAULT_RETRY_LIMIT
    backoff_base_ms: int = DEFAULT_BACKOFF_BASE_MS
    cache_dir: str = 'cache'
    signature_page_size: int = MAX_SIGNATURE_PAGE
    timeout_s: float = 30.0
    commitment: str = 'confirmed'

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {self.max_in_flight}")
        if self.retry_limit < 0:
            raise ValueError(f"retry_limit must be >= 0, got {self.retry_limit}")
        if self.backoff_base_ms < 1:
            raise ValueError(f"backoff_base_ms must be positive, got {self.backoff_base_ms}")
        if not 1 <= self.signature_page_size <= MAX_SIGNATURE_PAGE:
            raise ValueError(f"signature_page_size must be in 1..{MAX_SIGNATURE_PAGE}")

    def backoff_seconds(self, attempt: int) -> float:
        """Delay before retry number attempt + 1; grows geometrically."""
        return self.backoff_base_ms * (2 ** attempt) / 1000.0

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> 'IngestConfig':
        return cls(
            endpoint_url=data['endpoint_url'],
            max_in_flight=data.get('max_in_flight', DEFAULT_MAX_IN_FLIGHT),
            retry_limit=data.get('retry_limit', DEFAULT_RETRY_LIMIT),
            backoff_base_ms=data.get('backoff_base_ms', DEFAULT_BACKOFF_BASE_MS),
            cache_dir=data.get('cache_dir', 'cache'),
            signature_page_size=data.get('signature_page_size', MAX_SIGNATURE_PAGE),
            timeout_s=data.get('timeout_s', 30.0),
            commitment=data.get('commitment', 'confirmed'),
        )
