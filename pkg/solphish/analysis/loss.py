"""
Loss Accounting

USD value of what victims lost. Transfer-type detections are valued by
the victim's outflows; authority transfers by everything held in the
reassigned accounts, read from the same transaction's balances.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Dict, Iterable, List, Mapping, Tuple

from ..rules import Detection, PhishType
from ..txmodel import NATIVE_KEY, BalanceEntry, Transaction, holder_outflows
from .errors import ConsistencyError
from .prices import PriceTable

logger = logging.getLogger(__name__)

CENT = Decimal('0.01')


def to_usd(amount: int, decimals: int, price: Decimal) -> Decimal:
    """Base units times unit price."""
    return Decimal(amount).scaleb(-decimals) * price


def round_usd(value: Decimal) -> Decimal:
    return value.quantize(CENT)


@dataclass(frozen=True)
class LossResult:
    loss_usd: Decimal
    unpriced_assets: List[str] = field(default_factory=list)


def _reassigned_holdings(detection: Detection, tx: Transaction) -> List[Tuple[BalanceEntry, int]]:
    reassigned = {r['account'] for r in detection.evidence[PhishType.AAT.value]['reassignments']}
    return [(entry, entry.post) for entry in tx.balances if entry.account in reassigned]


def compute_loss(detection: Detection, tx: Transaction, prices: PriceTable) -> LossResult:
    """
    Value a detection in USD.

    The primary type decides the method: AAT sums post balances of the
    reassigned accounts; STMT and ISA sum the victim's outflows, not
    counting the transaction fee.

    Args:
        detection: Detection to value
        tx: The detection's transaction
        prices: Unit prices

    Returns:
        LossResult; assets without a price contribute nothing and are
        listed in unpriced_assets
    """
    if tx.signature != detection.tx_signature:
        raise ValueError(f"transaction {tx.signature} does not belong to detection "
                         f"{detection.tx_signature}")

    if detection.primary_type is PhishType.AAT:
        holdings = _reassigned_holdings(detection, tx)
    else:
        holdings = holder_outflows(tx, detection.victim)

    total = Decimal(0)
    unpriced: List[str] = []
    for entry, amount in holdings:
        if amount == 0:
            continue
        price = prices.price_of(entry.asset.key)
        if price is None:
            if entry.asset.key not in unpriced:
                unpriced.append(entry.asset.key)
            continue
        total += to_usd(amount, entry.decimals, price)
    return LossResult(loss_usd=total, unpriced_assets=unpriced)


def attach_losses(detections: Iterable[Detection], transactions: Mapping[str, Transaction],
                  prices: PriceTable) -> Tuple[List[Detection], Counter]:
    """
    Compute and attach loss_usd to every detection whose transaction is known.

    Returns:
        (detections with losses, count of detections per unpriced asset)
    """
    priced = []
    unpriced: Counter = Counter()
    for detection in detections:
        tx = transactions.get(detection.tx_signature)
        if tx is None:
            logger.warning("No transaction for detection %s; loss left empty",
                           detection.tx_signature)
            priced.append(detection)
            continue
        result = compute_loss(detection, tx, prices)
        unpriced.update(result.unpriced_assets)
        priced.append(detection.with_loss(result.loss_usd))
    if unpriced:
        logger.warning("Unpriced assets in %d detection(s): %s", sum(unpriced.values()),
                       ', '.join(sorted(unpriced)))
    return priced, unpriced


@dataclass
class TypeLoss:
    phish_type: PhishType
    count: int = 0
    total: Decimal = Decimal(0)
    highest: Decimal = Decimal(0)

    @property
    def average(self) -> Decimal:
        return self.total / self.count if self.count else Decimal(0)

    def to_dict(self) -> Dict:
        return {
            'type': self.phish_type.value,
            'count': self.count,
            'total_usd': str(round_usd(self.total)),
            'average_usd': str(round_usd(self.average)),
            'highest_usd': str(round_usd(self.highest)),
        }


@dataclass
class LossSummary:
    per_type: Dict[PhishType, TypeLoss]
    total: Decimal
    count: int

    @property
    def average(self) -> Decimal:
        return self.total / self.count if self.count else Decimal(0)

    def to_dict(self) -> Dict:
        return {
            'per_type': [self.per_type[t].to_dict() for t in PhishType],
            'count': self.count,
            'total_usd': str(round_usd(self.total)),
            'average_usd': str(round_usd(self.average)),
        }

    def check(self):
        """
        Raise ConsistencyError unless per-type totals add up to the grand
        total and each average times its count gives back its total.
        """
        type_sum = sum((t.total for t in self.per_type.values()), Decimal(0))
        if abs(type_sum - self.total) > CENT:
            raise ConsistencyError('loss additivity', f"per-type sum {type_sum} != total {self.total}")
        for loss in self.per_type.values():
            if abs(loss.average * loss.count - loss.total) > CENT:
                raise ConsistencyError('loss average', f"{loss.phish_type.value}: average x count "
                                                       f"!= total {loss.total}")


def loss_summary(detections: Iterable[Detection]) -> LossSummary:
    """
    Total, average and highest loss per primary type, plus the grand total.

    Detections without a loss count towards the totals as zero.

    Raises:
        ConsistencyError: the per-type figures do not add up
    """
    per_type = {t: TypeLoss(t) for t in PhishType}
    total = Decimal(0)
    count = 0
    for detection in detections:
        loss = detection.loss_usd or Decimal(0)
        bucket = per_type[detection.primary_type]
        bucket.count += 1
        bucket.total += loss
        bucket.highest = max(bucket.highest, loss)
        total += loss
        count += 1
    summary = LossSummary(per_type=per_type, total=total, count=count)
    summary.check()
    return summary


def top_tokens(detections: Iterable[Detection], k: int,
               include_native: bool = False) -> List[Tuple[str, int]]:
    """
    Most targeted assets.

    Args:
        detections: Detections whose assets are counted once each
        k: How many to return
        include_native: Count native SOL as well

    Returns:
        Up to k (asset key, detection count), count descending then key ascending
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    counts: Counter = Counter()
    for detection in detections:
        for key in set(detection.assets):
            if key == NATIVE_KEY and not include_native:
                continue
            counts[key] += 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
