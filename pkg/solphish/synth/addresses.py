"""
Synthetic Addresses

Addresses are 32 random bytes in base58. Vanity addresses patch a
prefix or suffix into such a string and keep it only if it still
decodes to exactly 32 bytes, so no keypair grinding is needed.
"""

from typing import Optional

import base58
import numpy as np

from ..rules import VANITY_PREFIX, VANITY_SUFFIX
from ..rules.lists import DEFAULT_MARKET_KEYWORDS
from ..txmodel import Address, InvalidAddress

SIGNATURE_BYTES = 64
MAX_ATTEMPTS = 1000


def _encode(raw: bytes) -> str:
    return base58.b58encode(raw).decode('ascii')


def _plain(text: str) -> bool:
    """No vanity pattern and no market keyword hidden in the text."""
    if text.startswith(VANITY_PREFIX) or text.endswith(VANITY_SUFFIX):
        return False
    lowered = text.lower()
    return not any(keyword in lowered for keyword in DEFAULT_MARKET_KEYWORDS)


def random_address(rng: np.random.Generator) -> Address:
    """
    A uniformly random address that matches neither vanity pattern.

    Log lines quote program addresses, so addresses containing a market
    keyword are resampled as well.
    """
    while True:
        text = _encode(rng.bytes(32))
        if _plain(text):
            return Address(text)


def vanity_address(rng: np.random.Generator, prefix: Optional[str] = None,
                   suffix: Optional[str] = None) -> Address:
    """
    A random address patched to start with prefix or end with suffix.

    Args:
        rng: Random generator
        prefix: Leading text, e.g. 'Compu'
        suffix: Trailing text, e.g. '11111'

    Returns:
        A valid address carrying the pattern

    Raises:
        ValueError: neither or both patterns given, or no valid patch found
    """
    if (prefix is None) == (suffix is None):
        raise ValueError('give exactly one of prefix or suffix')
    for _ in range(MAX_ATTEMPTS):
        text = _encode(rng.bytes(32))
        if prefix is not None:
            candidate = prefix + text[len(prefix):]
        else:
            candidate = text[:-len(suffix)] + suffix
        lowered = candidate.lower()
        if any(keyword in lowered for keyword in DEFAULT_MARKET_KEYWORDS):
            continue
        try:
            address = Address(candidate)
        except InvalidAddress:
            continue
        if address == candidate:
            return address
    raise ValueError(f"no valid address with prefix={prefix!r} suffix={suffix!r}")


def random_signature(rng: np.random.Generator) -> str:
    return _encode(rng.bytes(SIGNATURE_BYTES))


def random_blockhash(rng: np.random.Generator) -> str:
    return _encode(rng.bytes(32))
