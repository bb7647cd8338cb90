"""
Address Representation

Solana account addresses are base58 strings that decode to exactly
32 bytes. Addresses are kept as canonical strings so they can be
compared, sorted, hashed and serialised like any other string.
"""

from functools import lru_cache
from typing import Optional

import base58

from .errors import InvalidAddress

ADDRESS_BYTES = 32
MIN_ADDRESS_LENGTH = 32
MAX_ADDRESS_LENGTH = 44


@lru_cache(maxsize=65536)
def _canonical(value: str) -> str:
    if not MIN_ADDRESS_LENGTH <= len(value) <= MAX_ADDRESS_LENGTH:
        raise InvalidAddress(value, f"length {len(value)} outside 32-44")
    try:
        raw = base58.b58decode(value)
    except ValueError as e:
        raise InvalidAddress(value, str(e)) from None
    if len(raw) != ADDRESS_BYTES:
        raise InvalidAddress(value, f"decodes to {len(raw)} bytes")
    return base58.b58encode(raw).decode('ascii')


class Address(str):
    """
    A validated, canonical base58 account address.

    Construction fails with InvalidAddress unless the value decodes to
    32 bytes; the stored text is the canonical re-encoding.
    """

    __slots__ = ()

    def __new__(cls, value: object) -> 'Address':
        if isinstance(value, Address):
            return value
        if not isinstance(value, str):
            raise InvalidAddress(value, 'not a string')
        return super().__new__(cls, _canonical(value.strip()))

    @classmethod
    def parse(cls, value: object) -> 'Address':
        """Alias of the constructor, reads better at call sites."""
        return cls(value)

    @classmethod
    def optional(cls, value: object) -> Optional['Address']:
        """Parse value, mapping None and empty strings to None."""
        if value is None or value == '':
            return None
        return cls(value)

    def short(self) -> str:
        """Explorer-style abbreviation, e.g. BNRT...5Rep"""
        return f"{self[:4]}...{self[-4:]}"

    def __repr__(self) -> str:
        return f"Address({str.__repr__(self)})"


def is_valid_address(value: object) -> bool:
    """Return True if value is a canonical 32-byte base58 address."""
    try:
        Address(value)
    except InvalidAddress:
        return False
    return True
