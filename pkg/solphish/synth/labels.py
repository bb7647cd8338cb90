"""
Ground-truth labels for synthetic transactions.
"""

from enum import Enum
from typing import Optional, Set

from ..rules import PhishType


class Label(Enum):
    BENIGN = 'Benign'
    MARKET = 'Market'
    SELF_DEALING = 'SelfDealing'
    STMT = 'STMT'
    AAT_WALLET = 'AAT_Wallet'
    AAT_TOKEN = 'AAT_Token'
    AAT_BOTH = 'AAT_Both'
    ISA = 'ISA'

    @classmethod
    def parse(cls, value: str) -> 'Label':
        """Accept the value ('AAT_Wallet') or the member name ('aat_wallet')."""
        for label in cls:
            if value == label.value or value.upper() == label.name:
                return label
        raise ValueError(f"unknown label {value!r}; expected one of "
                         f"{', '.join(l.value for l in cls)}")

    @property
    def primary_type(self) -> Optional[PhishType]:
        return _PRIMARY.get(self)

    @property
    def is_phishing(self) -> bool:
        return self in _PRIMARY

    def expected_types(self) -> Set[PhishType]:
        """Types classify must report for a transaction with this label."""
        primary = self.primary_type
        return {primary} if primary is not None else set()


_PRIMARY = {
    Label.STMT: PhishType.STMT,
    Label.AAT_WALLET: PhishType.AAT,
    Label.AAT_TOKEN: PhishType.AAT,
    Label.AAT_BOTH: PhishType.AAT,
    Label.ISA: PhishType.ISA,
}
