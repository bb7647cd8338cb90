"""
Transaction Model Errors
"""

from ..errors import SolPhishError


class InvalidAddress(SolPhishError, ValueError):
    """Raised when a string is not a canonical 32-byte base58 address."""

    def __init__(self, value: object, reason: str):
        self.value = value
        self.reason = reason
        super().__init__(f"invalid address {value!r}: {reason}")


class RoleUnderdetermined(SolPhishError):
    """
    Raised when a transaction moves no balance and changes no authority,
    so neither a loser nor a beneficiary can be named.
    """

    def __init__(self, signature: str):
        self.signature = signature
        super().__init__(f"roles underdetermined for transaction {signature}")
