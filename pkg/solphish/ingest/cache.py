"""
Transaction Cache

Content-addressed store of raw records: one JSON file per signature
under the cache directory, written via a temporary file and an atomic
rename so concurrent writers never leave a torn file behind.
"""

import json
import logging
import os
import tempfile
from typing import List, Optional

import base58

from .errors import InvalidSignature, MalformedPayload
from .records import RawTransactionRecord

logger = logging.getLogger(__name__)


class TransactionCache:
    """
    Manages cached raw records with JSON-based persistence.
    """

    def __init__(self, cache_dir: str = 'cache'):
        """
        Initialize the cache.

        Args:
            cache_dir: Directory holding one <signature>.json per record
        """
        self.cache_dir = cache_dir
        os.makedirs(cache_dir, exist_ok=True)

    def path_for(self, signature: str) -> str:
        """
        Get file path for a signature.

        Raises:
            InvalidSignature: signature is not base58 text
        """
        try:
            decoded = base58.b58decode(signature)
        except ValueError:
            raise InvalidSignature(signature) from None
        if not decoded:
            raise InvalidSignature(signature)
        return os.path.join(self.cache_dir, f"{signature}.json")

    def contains(self, signature: str) -> bool:
        return os.path.exists(self.path_for(signature))

    def load(self, signature: str) -> Optional[RawTransactionRecord]:
        """
        Load a cached record.

        Args:
            signature: Transaction signature

        Returns:
            The stored record, or None on a miss or an unreadable file
        """
        path = self.path_for(signature)
        if not os.path.exists(path):
            return None

        try:
            with open(path, 'r', encoding='utf-8') as f:
                return RawTransactionRecord.from_dict(json.load(f))
        except (OSError, ValueError, MalformedPayload) as e:
            logger.warning("Ignoring unreadable cache entry %s: %s", path, e)
            return None

    def save(self, record: RawTransactionRecord):
        """
        Store a record, replacing any previous copy atomically.

        Args:
            record: Record to persist
        """
        path = self.path_for(record.signature)
        fd, tmp_path = tempfile.mkstemp(dir=self.cache_dir, prefix='.tmp-', suffix='.json')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8') as f:
                json.dump(record.to_dict(), f, ensure_ascii=False)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise

    def list_signatures(self) -> List[str]:
        """List all cached signatures, sorted"""
        if not os.path.exists(self.cache_dir):
            return []

        signatures = []
        for filename in os.listdir(self.cache_dir):
            if filename.endswith('.json') and not filename.startswith('.tmp-'):
                signatures.append(filename[:-5])
        return sorted(signatures)
