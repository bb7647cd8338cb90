"""
Phisher Statistics

Per-account attempt counts, losses and life cycles. The phishing
period runs from the first to the last detected phishing transaction;
the dormant period from the last phishing transaction to the account's
most recent activity of any kind.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Dict, Iterable, List, Mapping, Sequence

import numpy as np

from ..rules import Detection, PhishType
from ..txmodel import Address, Transaction
from .errors import MissingHistory
from .loss import round_usd

logger = logging.getLogger(__name__)

DAY = 86400


@dataclass
class PhisherStats:
    """
    Aggregated activity of one phishing account.
    """
    account: Address
    attempts: int
    total_loss_usd: Decimal
    first_phish: int
    last_phish: int
    last_activity: int
    dominant_type: PhishType
    type_counts: Dict[str, int] = field(default_factory=dict)
    history_missing: bool = False

    def __post_init__(self):
        if not self.first_phish <= self.last_phish <= self.last_activity:
            raise ValueError(f"{self.account}: lifecycle timestamps out of order")

    @property
    def phishing_period(self) -> int:
        """Seconds from first to last phishing transaction"""
        return self.last_phish - self.first_phish

    @property
    def dormant_period(self) -> int:
        """Seconds from last phishing transaction to last activity"""
        return self.last_activity - self.last_phish

    @property
    def life_cycle(self) -> int:
        return self.last_activity - self.first_phish

    def to_dict(self) -> Dict:
        return {
            'account': str(self.account),
            'attempts': self.attempts,
            'total_loss_usd': str(round_usd(self.total_loss_usd)),
            'dominant_type': self.dominant_type.value,
            'type_counts': dict(self.type_counts),
            'first_phish': self.first_phish,
            'last_phish': self.last_phish,
            'last_activity': self.last_activity,
            'phishing_period': self.phishing_period,
            'dormant_period': self.dormant_period,
            'history_missing': self.history_missing,
        }


def _dominant(counts: Counter) -> PhishType:
    # Most frequent; precedence order breaks ties
    return min(counts, key=lambda t: (-counts[t], t.precedence))


def phisher_stats(detections: Iterable[Detection],
                  full_histories: Mapping[str, Sequence[Transaction]],
                  strict: bool = False) -> List[PhisherStats]:
    """
    Aggregate detections per phisher.

    Args:
        detections: Detections (losses attached where known)
        full_histories: Account to its transaction history; may be partial
        strict: Raise MissingHistory instead of flagging the stats

    Returns:
        Stats sorted by attempts descending, then account ascending

    Raises:
        MissingHistory: only when strict and a phisher has no history
    """
    grouped: Dict[Address, List[Detection]] = defaultdict(list)
    for detection in detections:
        grouped[detection.phisher].append(detection)

    stats = []
    for account, own in grouped.items():
        times = [d.block_time for d in own]
        first, last = min(times), max(times)
        types = Counter(d.primary_type for d in own)

        history = full_histories.get(account)
        missing = history is None
        if missing:
            if strict:
                raise MissingHistory(account)
            logger.warning("No history for phisher %s; last activity set to last phish", account)
            last_activity = last
        else:
            last_activity = max([last] + [tx.block_time for tx in history])

        stats.append(PhisherStats(
            account=account,
            attempts=len(own),
            total_loss_usd=sum((d.loss_usd or Decimal(0) for d in own), Decimal(0)),
            first_phish=first,
            last_phish=last,
            last_activity=last_activity,
            dominant_type=_dominant(types),
            type_counts={t.value: types[t] for t in PhishType if types[t]},
            history_missing=missing,
        ))
    stats.sort(key=lambda s: (-s.attempts, s.account))
    return stats


def top_phishers(stats: Iterable[PhisherStats], k: int, by: str = 'attempts') -> List[PhisherStats]:
    """
    Top-k phishers by 'attempts' or by 'loss'; ties go to the smaller address.
    """
    if by == 'attempts':
        key = lambda s: (-s.attempts, s.account)
    elif by == 'loss':
        key = lambda s: (-s.total_loss_usd, s.account)
    else:
        raise ValueError(f"unknown ranking {by!r}")
    return sorted(stats, key=key)[:k]


def lifecycle_summary(stats: Sequence[PhisherStats], as_of: int, window_days: int = 30) -> Dict:
    """
    Share of phishers inactive for window_days before as_of, and
    per-type medians of the phishing and dormant periods (in days).
    """
    cutoff = as_of - window_days * DAY
    inactive = sum(1 for s in stats if s.last_activity < cutoff)

    per_type = {}
    for phish_type in PhishType:
        group = [s for s in stats if s.dominant_type is phish_type]
        if not group:
            continue
        phishing = np.array([s.phishing_period for s in group], dtype=float) / DAY
        dormant = np.array([s.dormant_period for s in group], dtype=float) / DAY
        cycles = phishing + dormant
        shares = np.divide(phishing, cycles, out=np.ones_like(phishing), where=cycles > 0)
        per_type[phish_type.value] = {
            'accounts': len(group),
            'median_phishing_days': round(float(np.median(phishing)), 2),
            'median_dormant_days': round(float(np.median(dormant)), 2),
            'mean_phishing_share': round(float(np.mean(shares)), 4),
        }

    return {
        'accounts': len(stats),
        'as_of': as_of,
        'window_days': window_days,
        'inactive': inactive,
        'inactive_share': round(inactive / len(stats), 4) if stats else 0.0,
        'per_type': per_type,
    }
