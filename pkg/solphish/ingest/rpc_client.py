"""
JSON-RPC Client

Data collection against a Solana JSON-RPC endpoint with request-level
parallelism: at most max_in_flight requests are outstanding at once,
failed calls retry with geometric backoff, and fetched transactions go
through the signature cache.
"""

import itertools
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Any, Callable, List, Optional

import requests

from .cache import TransactionCache
from .config import IngestConfig
from .errors import EndpointUnavailable, NotFound, RateLimited, RpcError
from .records import RawTransactionRecord

logger = logging.getLogger(__name__)

# JSON-RPC error codes worth another attempt (node behind, slot skipped, throttled)
RETRYABLE_RPC_CODES = {-32004, -32005, -32014, -32429}
INVALID_PARAMS = -32602


def _retry_after(response: requests.Response) -> Optional[float]:
    value = response.headers.get('Retry-After')
    if value is None:
        return None
    try:
        return float(value)
    except ValueError:
        return None


class RpcClient:
    """
    Solana JSON-RPC client used by the data collection step.
    """

    def __init__(self, config: IngestConfig, session: Optional[requests.Session] = None,
                 cache: Optional[TransactionCache] = None,
                 sleep: Callable[[float], None] = time.sleep):
        """
        Initialize the client.

        Args:
            config: Endpoint, concurrency and retry settings
            session: HTTP session; tests inject a fake endpoint here
            cache: Signature cache (default: one rooted at config.cache_dir)
            sleep: Sleep function used between retries
        """
        self.config = config
        self.session = session or requests.Session()
        self.cache = cache or TransactionCache(config.cache_dir)
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._ids = itertools.count(1)
        self._lock = threading.Lock()
        self.network_calls = 0
        self.cache_hits = 0

    def _call(self, method: str, params: List[Any]) -> Any:
        """
        Perform one JSON-RPC call with bounded retries.

        Returns:
            The 'result' member of the response (may be None)
        """
        attempt = 0
        while True:
            payload = {'jsonrpc': '2.0', 'id': next(self._ids), 'method': method, 'params': params}
            try:
                with self._slots:
                    with self._lock:
                        self.network_calls += 1
                    response = self.session.post(self.config.endpoint_url, json=payload,
                                                 timeout=self.config.timeout_s)
            except (requests.ConnectionError, requests.Timeout) as e:
                failure = str(e)
                delay = self.config.backoff_seconds(attempt)
            else:
                if response.status_code == 429:
                    hint = _retry_after(response)
                    if attempt >= self.config.retry_limit:
                        raise RateLimited(method, hint)
                    failure = 'HTTP 429'
                    delay = max(hint or 0.0, self.config.backoff_seconds(attempt))
                elif response.status_code >= 500:
                    failure = f"HTTP {response.status_code}"
                    delay = self.config.backoff_seconds(attempt)
                elif response.status_code >= 400:
                    raise EndpointUnavailable(method, attempt + 1, f"HTTP {response.status_code}")
                else:
                    body = response.json()
                    error = body.get('error')
                    if not error:
                        return body.get('result')
                    code = error.get('code', 0)
                    if code not in RETRYABLE_RPC_CODES:
                        raise RpcError(method, code, error.get('message', ''))
                    failure = f"RPC error {code}"
                    delay = self.config.backoff_seconds(attempt)

            if attempt >= self.config.retry_limit:
                raise EndpointUnavailable(method, attempt + 1, failure)
            logger.warning("%s failed (%s); retry %d/%d in %.2fs", method, failure,
                           attempt + 1, self.config.retry_limit, delay)
            self._sleep(delay)
            attempt += 1

    def fetch_signatures(self, account: str, limit: int,
                         before: Optional[str] = None) -> List[str]:
        """
        Fetch an account's transaction signatures, newest first.

        Args:
            account: Account address
            limit: Maximum number of signatures to return
            before: Resume pagination below this signature

        Returns:
            Up to limit signatures
        """
        if limit < 1:
            raise ValueError(f"limit must be positive, got {limit}")

        signatures: List[str] = []
        cursor = before
        while len(signatures) < limit:
            page_size = min(self.config.signature_page_size, limit - len(signatures))
            options = {'limit': page_size, 'commitment': self.config.commitment}
            if cursor is not None:
                options['before'] = cursor
            page = self._call('getSignaturesForAddress', [str(account), options]) or []
            batch = [item['signature'] for item in page]
            signatures.extend(batch)
            if len(batch) < page_size:
                break
            cursor = batch[-1]

        logger.info("Fetched %d signature(s) for %s", len(signatures), account)
        return signatures

    def fetch_transaction(self, signature: str) -> RawTransactionRecord:
        """
        Fetch one transaction in jsonParsed encoding, serving from the cache when possible.

        Args:
            signature: Transaction signature

        Returns:
            The raw record

        Raises:
            NotFound: the endpoint does not know the signature
            InvalidSignature: signature is not base58 text
        """
        cached = self.cache.load(signature)
        if cached is not None:
            with self._lock:
                self.cache_hits += 1
            return cached

        params = [signature, {
            'encoding': 'jsonParsed',
            'maxSupportedTransactionVersion': 0,
            'commitment': self.config.commitment,
        }]
        try:
            result = self._call('getTransaction', params)
        except RpcError as e:
            if e.code == INVALID_PARAMS:
                raise NotFound(signature) from e
            raise
        if result is None:
            raise NotFound(signature)

        record = RawTransactionRecord(
            signature=signature,
            payload=result,
            fetched_at=datetime.now(timezone.utc).replace(microsecond=0),
        )
        self.cache.save(record)
        return record

    def fetch_transactions(self, signatures: List[str]) -> List[RawTransactionRecord]:
        """
        Fetch many transactions in parallel; unknown signatures are logged and skipped.

        Returns:
            Records in the order of the input signatures
        """
        def fetch_or_none(signature: str) -> Optional[RawTransactionRecord]:
            try:
                return self.fetch_transaction(signature)
            except NotFound:
                logger.warning("Skipping unknown transaction %s", signature)
                return None

        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            results = list(pool.map(fetch_or_none, signatures))
        return [record for record in results if record is not None]

    def ingest_account(self, account: str, limit: int) -> List[RawTransactionRecord]:
        """
        Collect the recent history of one account.

        Args:
            account: Account address
            limit: Maximum number of transactions

        Returns:
            Raw records, newest first
        """
        signatures = self.fetch_signatures(account, limit)
        records = self.fetch_transactions(signatures)
        logger.info("Ingested %d transaction(s) for %s (%d network call(s), %d cache hit(s))",
                    len(records), account, self.network_calls, self.cache_hits)
        return records
