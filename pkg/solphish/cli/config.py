"""
Run Configuration

Everything a scan, analyze or export run needs: where to fetch from,
which lists to apply and where to write. Settings come from a JSON file,
the environment and command-line flags, in rising precedence.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from typing import Dict, FrozenSet, Mapping, Optional

import base58

from ..analysis import PriceTable, load_price_table
from ..ingest import IngestConfig
from ..ingest.config import DEFAULT_MAX_IN_FLIGHT, DEFAULT_RETRY_LIMIT
from ..rules import (
    VANITY_PREFIX,
    VANITY_SUFFIX,
    MarketList,
    RuleSet,
    default_official_allowlist,
    load_address_list,
    load_market_list,
    load_official_allowlist,
)
from ..txmodel import Address
from .errors import ConfigError

logger = logging.getLogger(__name__)

RPC_URL_ENV = 'SOLPHISH_RPC_URL'
# Input files; output_dir and cache_dir stay relative to the working directory
PATH_FIELDS = ('markets_path', 'official_allowlist_path', 'benign_programs_path',
               'prices_path', 'labeled_phishers_path')


@dataclass
class RunConfig:
    """
    Settings for one command invocation.

    A list path left as None means the built-in list: no market
    addresses, the default official allowlist, no benign programs.
    """
    rpc_url: Optional[str] = None
    markets_path: Optional[str] = None
    official_allowlist_path: Optional[str] = None
    benign_programs_path: Optional[str] = None
    prices_path: Optional[str] = None
    labeled_phishers_path: Optional[str] = None
    output_dir: str = 'out'
    cache_dir: str = 'cache'
    isa_prefix: str = VANITY_PREFIX
    isa_suffix: str = VANITY_SUFFIX
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT
    retry_limit: int = DEFAULT_RETRY_LIMIT

    def __post_init__(self):
        if self.rpc_url is not None and not self.rpc_url.startswith(('http://', 'https://')):
            raise ConfigError('rpc_url', f"not an http(s) URL: {self.rpc_url!r}")
        if not self.output_dir:
            raise ConfigError('output_dir', 'must not be empty')
        for name in ('isa_prefix', 'isa_suffix'):
            pattern = getattr(self, name)
            if not pattern:
                raise ConfigError(name, 'must not be empty')
            try:
                base58.b58decode(pattern)
            except ValueError:
                raise ConfigError(name, f"{pattern!r} has non-base58 characters") from None
        if self.max_in_flight < 1:
            raise ConfigError('max_in_flight', f"must be >= 1, got {self.max_in_flight}")
        if self.retry_limit < 0:
            raise ConfigError('retry_limit', f"must be >= 0, got {self.retry_limit}")

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> 'RunConfig':
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, 'unknown field')
        return cls(**dict(data))

    def ingest_config(self) -> IngestConfig:
        if not self.rpc_url:
            raise ConfigError('rpc_url', f"required to fetch from the network (or set {RPC_URL_ENV})")
        return IngestConfig(endpoint_url=self.rpc_url, max_in_flight=self.max_in_flight,
                            retry_limit=self.retry_limit, cache_dir=self.cache_dir)

    def ruleset(self) -> RuleSet:
        """Load the configured lists. Raises ListFileError on a bad file."""
        markets = load_market_list(self.markets_path) if self.markets_path else MarketList()
        allowlist = (load_official_allowlist(self.official_allowlist_path)
                     if self.official_allowlist_path else default_official_allowlist())
        benign = (load_address_list(self.benign_programs_path)
                  if self.benign_programs_path else frozenset())
        return RuleSet(markets=markets, allowlist=allowlist, benign_programs=benign,
                       isa_prefix=self.isa_prefix, isa_suffix=self.isa_suffix)

    def price_table(self) -> Optional[PriceTable]:
        return load_price_table(self.prices_path) if self.prices_path else None

    def labeled_phishers(self) -> Optional[FrozenSet[Address]]:
        if not self.labeled_phishers_path:
            return None
        return load_address_list(self.labeled_phishers_path)


def _read_config_file(path: str) -> Dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError('config', f"{path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError('config', f"{path}:{e.lineno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError('config', f"{path}: expected a JSON object")

    # Relative paths in a config file are relative to the file itself
    base = os.path.dirname(os.path.abspath(path))
    for name in PATH_FIELDS:
        value = data.get(name)
        if isinstance(value, str) and value and not os.path.isabs(value):
            data[name] = os.path.normpath(os.path.join(base, value))
    return data


def load_run_config(path: Optional[str] = None, overrides: Optional[Mapping] = None,
                    environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Build a RunConfig from a file, the environment and flag overrides.

    Args:
        path: JSON config file, or None for the defaults
        overrides: Flag values; None entries are ignored
        environ: Environment to read SOLPHISH_RPC_URL from (os.environ by default)

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: unreadable file, unknown field or invalid value
    """
    data = _read_config_file(path) if path else {}
    environ = os.environ if environ is None else environ
    if environ.get(RPC_URL_ENV):
        data['rpc_url'] = environ[RPC_URL_ENV]
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    config = RunConfig.from_dict(data)
    logger.debug("Run config: %s", config.to_dict())
    return config
