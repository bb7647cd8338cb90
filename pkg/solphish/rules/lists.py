"""
Rule Input Lists

Market addresses and keywords, the official-account allowlist and the
benign-program allowlist. All three are read from files so operators
can extend them without touching the rules.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable

from ..txmodel import (
    COMPUTE_BUDGET_PROGRAM,
    NATIVE_LOADER,
    SYSTEM_PROGRAM,
    Address,
    InvalidAddress,
)
from ..txmodel.programs import (
    ASSOCIATED_TOKEN_PROGRAM,
    MEMO_PROGRAM,
    TOKEN_2022_PROGRAM,
    TOKEN_PROGRAM,
)
from .errors import ListFileError

logger = logging.getLogger(__name__)

DEFAULT_MARKET_KEYWORDS = frozenset({'buy', 'sell', 'purchase'})

# The system accounts vanity addresses imitate
REQUIRED_OFFICIAL = frozenset({SYSTEM_PROGRAM, COMPUTE_BUDGET_PROGRAM, NATIVE_LOADER})


@dataclass(frozen=True)
class MarketList:
    """
    Trading-market addresses and the log keywords that mark market activity.
    """
    addresses: FrozenSet[Address] = frozenset()
    keywords: FrozenSet[str] = DEFAULT_MARKET_KEYWORDS

    def __post_init__(self):
        object.__setattr__(self, 'addresses', frozenset(Address(a) for a in self.addresses))
        keywords = frozenset(k.strip().lower() for k in self.keywords if k.strip())
        if not keywords:
            raise ValueError('market keyword set must not be empty')
        object.__setattr__(self, 'keywords', keywords)

    def __contains__(self, address: object) -> bool:
        return address in self.addresses

    def matching_keyword(self, line: str) -> str:
        """First keyword (alphabetically) contained in line, or ''."""
        lowered = line.lower()
        for keyword in sorted(self.keywords):
            if keyword in lowered:
                return keyword
        return ''


@dataclass(frozen=True)
class OfficialAllowlist:
    """
    Official system and program accounts that are never impersonators.
    """
    addresses: FrozenSet[Address] = field(default_factory=lambda: REQUIRED_OFFICIAL)

    def __post_init__(self):
        addresses = frozenset(Address(a) for a in self.addresses)
        missing = REQUIRED_OFFICIAL - addresses
        if missing:
            raise ValueError(f"official allowlist lacks system accounts: {sorted(missing)}")
        object.__setattr__(self, 'addresses', addresses)

    def __contains__(self, address: object) -> bool:
        return address in self.addresses

    def extended(self, extra: Iterable[str]) -> 'OfficialAllowlist':
        return OfficialAllowlist(self.addresses | frozenset(Address(a) for a in extra))


def default_official_allowlist() -> OfficialAllowlist:
    """The system accounts plus the token, associated-token and memo programs."""
    return OfficialAllowlist(REQUIRED_OFFICIAL | {
        TOKEN_PROGRAM, TOKEN_2022_PROGRAM, ASSOCIATED_TOKEN_PROGRAM, MEMO_PROGRAM,
    })


def load_address_list(path: str) -> FrozenSet[Address]:
    """
    Read a newline-delimited address file. '#' starts a comment.

    Raises:
        ListFileError: unreadable file or invalid address (with line number)
    """
    addresses = set()
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for number, line in enumerate(f, start=1):
                text = line.split('#', 1)[0].strip()
                if not text:
                    continue
                try:
                    addresses.add(Address(text))
                except InvalidAddress as e:
                    raise ListFileError(path, e.reason, number) from None
    except OSError as e:
        raise ListFileError(path, e.strerror or str(e)) from None
    logger.debug("Loaded %d address(es) from %s", len(addresses), path)
    return frozenset(addresses)


def load_official_allowlist(path: str) -> OfficialAllowlist:
    """Allowlist file contents; the required system accounts are always included."""
    return OfficialAllowlist(load_address_list(path) | REQUIRED_OFFICIAL)


def load_market_list(path: str) -> MarketList:
    """
    Read a markets file: {"addresses": [...], "keywords": [...]}.

    An address entry is either a string or an object with an "address"
    key (other keys such as "name" and "source" document provenance).
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ListFileError(path, e.strerror or str(e)) from None
    except json.JSONDecodeError as e:
        raise ListFileError(path, e.msg, e.lineno) from None

    if not isinstance(data, dict):
        raise ListFileError(path, 'expected a JSON object')

    addresses = set()
    for i, entry in enumerate(data.get('addresses', [])):
        value = entry.get('address') if isinstance(entry, dict) else entry
        try:
            addresses.add(Address(value))
        except InvalidAddress as e:
            raise ListFileError(path, f"addresses[{i}]: {e.reason}") from None

    keywords = data.get('keywords')
    try:
        return MarketList(frozenset(addresses),
                          frozenset(keywords) if keywords is not None else DEFAULT_MARKET_KEYWORDS)
    except ValueError as e:
        raise ListFileError(path, str(e)) from None
