"""
Detection Records

A Detection is one flagged transaction: the phishing types that fired,
victim and phisher, the predicate hits backing each type and an
optional USD loss. Detections are persisted as JSON-lines with a fixed
field order and schema version.
"""

import json
import os
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from ..txmodel import Address
from .errors import DetectionFormatError

SCHEMA_VERSION = '1'


class PhishType(Enum):
    """Phishing families, declared in precedence order"""
    AAT = 'AAT'
    STMT = 'STMT'
    ISA = 'ISA'

    @property
    def precedence(self) -> int:
        return _PRECEDENCE[self]

    @classmethod
    def ordered(cls, types: Iterable['PhishType']) -> List['PhishType']:
        """Deduplicate and sort by precedence AAT > STMT > ISA."""
        return sorted(set(types), key=lambda t: t.precedence)


_PRECEDENCE = {PhishType.AAT: 0, PhishType.STMT: 1, PhishType.ISA: 2}


@dataclass(frozen=True)
class Detection:
    """
    One flagged transaction.

    evidence maps each fired type's name to its predicate hits, e.g.
    {'STMT': {'transfer_count': 5, 'drained': [[account, mint], ...],
    'durable_nonce': False}}.
    """
    tx_signature: str
    phish_types: List[PhishType]
    victim: Address
    phisher: Address
    evidence: Dict[str, Dict[str, Any]]
    slot: int = 0
    block_time: int = 0
    assets: List[str] = field(default_factory=list)
    loss_usd: Optional[Decimal] = None

    def __post_init__(self):
        if not self.phish_types:
            raise ValueError(f"detection {self.tx_signature} has no phish type")
        if list(self.phish_types) != PhishType.ordered(self.phish_types):
            raise ValueError(f"detection {self.tx_signature}: types not in precedence order")
        if self.victim == self.phisher:
            raise ValueError(f"detection {self.tx_signature}: victim equals phisher")
        for phish_type in self.phish_types:
            if not self.evidence.get(phish_type.value):
                raise ValueError(f"detection {self.tx_signature}: no evidence for {phish_type.value}")
        if self.loss_usd is not None and self.loss_usd < 0:
            raise ValueError(f"detection {self.tx_signature}: negative loss")

    @property
    def primary_type(self) -> PhishType:
        return self.phish_types[0]

    @property
    def durable_nonce(self) -> bool:
        return any(hits.get('durable_nonce') for hits in self.evidence.values())

    def with_loss(self, loss_usd: Decimal) -> 'Detection':
        return replace(self, loss_usd=loss_usd)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize with the stable schema field order"""
        return {
            'schema_version': SCHEMA_VERSION,
            'tx_signature': self.tx_signature,
            'slot': self.slot,
            'block_time': self.block_time,
            'phish_types': [t.value for t in self.phish_types],
            'victim': str(self.victim),
            'phisher': str(self.phisher),
            'assets': list(self.assets),
            'evidence': {t.value: self.evidence[t.value] for t in self.phish_types},
            'loss_usd': str(self.loss_usd) if self.loss_usd is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Detection':
        version = data.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}")
        loss = data.get('loss_usd')
        try:
            loss_usd = Decimal(loss) if loss is not None else None
        except InvalidOperation:
            raise ValueError(f"loss_usd is not a decimal: {loss!r}") from None
        return cls(
            tx_signature=data['tx_signature'],
            phish_types=[PhishType(t) for t in data['phish_types']],
            victim=Address(data['victim']),
            phisher=Address(data['phisher']),
            evidence=data['evidence'],
            slot=data.get('slot', 0),
            block_time=data.get('block_time', 0),
            assets=list(data.get('assets', [])),
            loss_usd=loss_usd,
        )


def write_detections(path: str, detections: Iterable[Detection]) -> int:
    """
    Write detections as JSON-lines.

    Returns:
        Number of detections written
    """
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for detection in detections:
            f.write(json.dumps(detection.to_dict(), ensure_ascii=False, separators=(',', ':')))
            f.write('\n')
            count += 1
    return count


def read_detections(path: str) -> List[Detection]:
    """
    Read a detections file written by write_detections.

    Raises:
        DetectionFormatError: with the offending line number
    """
    detections = []
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                detections.append(Detection.from_dict(json.loads(line)))
            except (KeyError, TypeError, ValueError) as e:
                raise DetectionFormatError(path, number, str(e) or type(e).__name__) from None
    return detections
