"""
Analysis Errors
"""

from ..errors import SolPhishError


class ConsistencyError(SolPhishError):
    """An internal-consistency invariant of the reports does not hold."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant} violated: {detail}")


class MissingHistory(SolPhishError):
    """No activity history was supplied for a phisher."""

    def __init__(self, account: str):
        self.account = account
        super().__init__(f"no history for phisher {account}")


class PriceTableError(SolPhishError):
    """A price table file or price API response could not be used."""

    def __init__(self, source: str, reason: str):
        self.source = source
        self.reason = reason
        super().__init__(f"{source}: {reason}")
