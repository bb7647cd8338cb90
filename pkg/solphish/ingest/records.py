"""
Raw Transaction Records

A raw record is the verbatim getTransaction result for one signature,
stamped with when it was fetched. Records are what the cache stores and
what fixture files contain, one JSON object per line.
"""

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from .errors import MalformedPayload


def format_timestamp(moment: datetime) -> str:
    """UTC ISO-8601 with a trailing Z, second precision."""
    return moment.astimezone(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ')


def parse_timestamp(text: str) -> datetime:
    if text.endswith('Z'):
        text = text[:-1] + '+00:00'
    moment = datetime.fromisoformat(text)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc)


@dataclass(frozen=True)
class RawTransactionRecord:
    """
    One transaction payload as received from a data source.
    """
    signature: str
    payload: Dict[str, Any]
    fetched_at: datetime
    provenance: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.payload, dict):
            raise MalformedPayload('$', 'payload is not a JSON object')
        for section in ('transaction', 'meta'):
            if section not in self.payload:
                raise MalformedPayload(f"$.{section}", 'missing section')

    def to_dict(self) -> Dict[str, Any]:
        """Stable field order for JSON-lines output"""
        data: Dict[str, Any] = {
            'signature': self.signature,
            'fetched_at': format_timestamp(self.fetched_at),
        }
        if self.provenance is not None:
            data['provenance'] = self.provenance
        data['payload'] = self.payload
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RawTransactionRecord':
        if not isinstance(data, dict):
            raise MalformedPayload('$', 'record is not a JSON object')
        for key in ('signature', 'fetched_at', 'payload'):
            if key not in data:
                raise MalformedPayload(f"$.{key}", 'missing field')
        try:
            fetched_at = parse_timestamp(data['fetched_at'])
        except (TypeError, ValueError) as e:
            raise MalformedPayload('$.fetched_at', str(e)) from None
        return cls(
            signature=data['signature'],
            payload=data['payload'],
            fetched_at=fetched_at,
            provenance=data.get('provenance'),
        )
