"""
Prerequisite Filter

Rejects market activity and self-dealing before any detector runs.
Conditions are checked in a fixed order and the first failure names
the rejection.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..txmodel import Roles, Transaction
from .lists import MarketList


class RejectReason(Enum):
    LOSER_MARKET = 'loser_market'
    BENEFICIARY_MARKET = 'beneficiary_market'
    LOG_KEYWORD = 'log_keyword'
    SELF_DEALING = 'self_dealing'
    MISSING_ROLE = 'missing_role'


@dataclass(frozen=True)
class PrerequisiteResult:
    """Pass, or Reject with the first failing condition"""
    reason: Optional[RejectReason] = None
    detail: str = ''

    @property
    def passed(self) -> bool:
        return self.reason is None

    def __bool__(self) -> bool:
        return self.passed


PASS = PrerequisiteResult()


def check_prerequisites(tx: Transaction, roles: Roles, markets: MarketList) -> PrerequisiteResult:
    """
    Apply the four prerequisites to a transaction under one family's roles.

    A transaction with no loser or no beneficiary cannot satisfy the
    prerequisites and is rejected with MISSING_ROLE after the market
    and keyword checks.

    Args:
        tx: Transaction under test
        roles: Roles derived for the family being evaluated
        markets: Market addresses and keywords

    Returns:
        PASS or a rejection
    """
    if roles.loser is not None and roles.loser in markets:
        return PrerequisiteResult(RejectReason.LOSER_MARKET, str(roles.loser))
    if roles.beneficiary is not None and roles.beneficiary in markets:
        return PrerequisiteResult(RejectReason.BENEFICIARY_MARKET, str(roles.beneficiary))
    for line in tx.logs:
        keyword = markets.matching_keyword(line)
        if keyword:
            return PrerequisiteResult(RejectReason.LOG_KEYWORD, keyword)
    if roles.loser is None or roles.beneficiary is None:
        return PrerequisiteResult(RejectReason.MISSING_ROLE)
    if roles.loser == roles.beneficiary:
        return PrerequisiteResult(RejectReason.SELF_DEALING, str(roles.loser))
    return PASS
