"""
Temporal Distribution

Monthly detection counts and daily losses, bucketed in UTC by each
detection's primary type.
"""

from collections import defaultdict
from datetime import datetime, timezone
from decimal import Decimal
from typing import Dict, Iterable, Tuple

from ..rules import Detection

Month = Tuple[int, int]


def _utc(block_time: int) -> datetime:
    return datetime.fromtimestamp(block_time, tz=timezone.utc)


def monthly_histogram(detections: Iterable[Detection]) -> Dict[Month, Dict[str, int]]:
    """
    Count detections per (year, month) and primary type.

    Args:
        detections: Detections with block times

    Returns:
        {(year, month): {type: count}}, months ascending; the grand sum
        equals the number of detections
    """
    buckets: Dict[Month, Dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for detection in detections:
        moment = _utc(detection.block_time)
        buckets[(moment.year, moment.month)][detection.primary_type.value] += 1
    return {month: dict(sorted(buckets[month].items())) for month in sorted(buckets)}


def daily_losses(detections: Iterable[Detection]) -> Dict[Tuple[str, str], Decimal]:
    """
    Sum USD losses per (UTC date, primary type); unpriced detections are skipped.
    """
    series: Dict[Tuple[str, str], Decimal] = defaultdict(Decimal)
    for detection in detections:
        if detection.loss_usd is None:
            continue
        day = _utc(detection.block_time).strftime('%Y-%m-%d')
        series[(day, detection.primary_type.value)] += detection.loss_usd
    return dict(sorted(series.items()))
