"""
Data Collection

Fetches transactions from a JSON-RPC endpoint or fixture files,
caches raw payloads by signature and normalizes them into the
transaction model.
"""

from .cache import TransactionCache
from .config import IngestConfig
from .errors import (
    EndpointUnavailable,
    IngestError,
    InvalidSignature,
    MalformedPayload,
    NotFound,
    RateLimited,
    RpcError,
)
from .fixtures import encode_record, load_fixture, load_records, write_fixture
from .normalizer import normalize, normalize_authority_type
from .records import RawTransactionRecord, format_timestamp, parse_timestamp
from .rpc_client import RpcClient

__all__ = [
    'TransactionCache', 'IngestConfig',
    'EndpointUnavailable', 'IngestError', 'InvalidSignature', 'MalformedPayload', 'NotFound',
    'RateLimited', 'RpcError',
    'encode_record', 'load_fixture', 'load_records', 'write_fixture',
    'normalize', 'normalize_authority_type',
    'RawTransactionRecord', 'format_timestamp', 'parse_timestamp',
    'RpcClient',
]
