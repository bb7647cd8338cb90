"""
Price Table

Latest USD unit prices per asset, loaded from a snapshot file so loss
figures are reproducible. A helper can populate a snapshot from a
price API; nothing else touches the network.
"""

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, Optional, Tuple

import requests

from ..ingest.records import format_timestamp, parse_timestamp
from ..txmodel import NATIVE_KEY, Asset
from .errors import PriceTableError

logger = logging.getLogger(__name__)

# Price APIs quote native SOL through the wrapped-SOL mint
WRAPPED_SOL_MINT = 'So11111111111111111111111111111111111111112'
DEFAULT_PRICE_API = 'https://api.jup.ag/price/v2'


@dataclass(frozen=True)
class PriceTable:
    """
    Asset key ('NATIVE' or a mint) to (USD unit price, as-of time).

    Assets without a price are absent; lookups return None for them.
    """
    entries: Dict[str, Tuple[Decimal, datetime]] = field(default_factory=dict)
    source: str = 'empty'

    def __post_init__(self):
        for key, (price, _) in self.entries.items():
            if price < 0:
                raise ValueError(f"negative price for {key}: {price}")

    def __contains__(self, key: object) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def price_of(self, asset_key: str) -> Optional[Decimal]:
        entry = self.entries.get(asset_key)
        return entry[0] if entry is not None else None

    def to_dict(self) -> Dict:
        as_of = max((moment for _, moment in self.entries.values()), default=None)
        return {
            'source': self.source,
            'as_of': format_timestamp(as_of) if as_of is not None else None,
            'prices': {key: str(price) for key, (price, _) in sorted(self.entries.items())},
        }


def _parse_prices(data: Dict, origin: str) -> PriceTable:
    if not isinstance(data, dict) or not isinstance(data.get('prices'), dict):
        raise PriceTableError(origin, 'expected an object with a "prices" map')
    try:
        default_as_of = parse_timestamp(data['as_of']) if data.get('as_of') else \
            datetime.fromtimestamp(0, timezone.utc)
    except ValueError as e:
        raise PriceTableError(origin, f"bad as_of: {e}") from None

    entries = {}
    for key, value in data['prices'].items():
        as_of = default_as_of
        try:
            if isinstance(value, dict):
                if value.get('as_of'):
                    as_of = parse_timestamp(value['as_of'])
                value = value.get('usd')
            asset = Asset.from_key(key)
            price = Decimal(str(value))
        except (ValueError, InvalidOperation) as e:
            raise PriceTableError(origin, f"prices[{key!r}]: {e}") from None
        if not price.is_finite() or price < 0:
            raise PriceTableError(origin, f"prices[{key!r}]: not a non-negative price")
        entries[asset.key] = (price, as_of)
    return PriceTable(entries=entries, source=str(data.get('source', origin)))


def load_price_table(path: str) -> PriceTable:
    """
    Load a price snapshot: {"source": ..., "as_of": ..., "prices": {key: price}}.

    A price may also be an object {"usd": price, "as_of": time} to carry
    its own timestamp.
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f, parse_float=Decimal)
    except OSError as e:
        raise PriceTableError(path, e.strerror or str(e)) from None
    except json.JSONDecodeError as e:
        raise PriceTableError(path, f"line {e.lineno}: {e.msg}") from None
    table = _parse_prices(data, path)
    logger.info("Loaded %d price(s) from %s", len(table), path)
    return table


def fetch_price_table(asset_keys: Iterable[str], endpoint: str = DEFAULT_PRICE_API,
                      session: Optional[requests.Session] = None,
                      timeout_s: float = 30.0) -> PriceTable:
    """
    Build a snapshot from a price API answering GET ?ids=a,b with
    {"data": {mint: {"price": "1.23"}}}.

    Args:
        asset_keys: 'NATIVE' and/or mints to price
        endpoint: Price API URL
        session: HTTP session (tests inject a fake)
        timeout_s: Request timeout

    Returns:
        PriceTable; assets the API does not quote are left out
    """
    keys = sorted(set(asset_keys))
    ids = [WRAPPED_SOL_MINT if key == NATIVE_KEY else key for key in keys]
    if not ids:
        return PriceTable(source=endpoint)

    http = session or requests.Session()
    try:
        response = http.get(endpoint, params={'ids': ','.join(ids)}, timeout=timeout_s)
        response.raise_for_status()
        quotes = response.json().get('data') or {}
    except (requests.RequestException, ValueError) as e:
        raise PriceTableError(endpoint, str(e)) from None

    now = datetime.now(timezone.utc).replace(microsecond=0)
    prices = {}
    for key, quote_id in zip(keys, ids):
        quote = quotes.get(quote_id)
        if not quote or quote.get('price') is None:
            logger.warning("No price quoted for %s", key)
            continue
        prices[key] = {'usd': str(quote['price']), 'as_of': format_timestamp(now)}
    return _parse_prices({'source': endpoint, 'prices': prices}, endpoint)
