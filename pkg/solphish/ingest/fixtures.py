"""
Fixture Files

JSON-lines files of raw records, one per line, UTF-8 with LF endings.
The same format carries recorded real transactions, synthetic corpora
and scanned account histories.
"""

import json
import logging
import os
from typing import Iterable, List

from ..txmodel import Transaction
from .errors import MalformedPayload
from .normalizer import normalize
from .records import RawTransactionRecord

logger = logging.getLogger(__name__)


def encode_record(record: RawTransactionRecord) -> str:
    """One fixture line, without the trailing newline."""
    return json.dumps(record.to_dict(), ensure_ascii=False, separators=(',', ':'))


def load_records(path: str) -> List[RawTransactionRecord]:
    """
    Read raw records from a JSON-lines file. Blank lines are skipped.

    Raises:
        MalformedPayload: carrying the 1-based line number
    """
    records = []
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedPayload('$', f"invalid JSON: {e.msg}", number) from None
            try:
                records.append(RawTransactionRecord.from_dict(data))
            except MalformedPayload as e:
                raise e.at_line(number) from None
    return records


def load_fixture(path: str) -> List[Transaction]:
    """
    Load and normalize every record in a fixture file.

    Args:
        path: JSON-lines fixture

    Returns:
        Transactions in file order

    Raises:
        MalformedPayload: with the line number of the first bad record
    """
    transactions = []
    with open(path, 'r', encoding='utf-8') as f:
        lines = f.readlines()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = RawTransactionRecord.from_dict(json.loads(line))
            transactions.append(normalize(record))
        except json.JSONDecodeError as e:
            raise MalformedPayload('$', f"invalid JSON: {e.msg}", number) from None
        except MalformedPayload as e:
            raise e.at_line(number) from None
        except ValueError as e:
            # Model invariants (fee payer, balances) rejected the payload
            raise MalformedPayload('$', str(e), number) from None
    logger.info("Loaded %d transaction(s) from %s", len(transactions), path)
    return transactions


def write_fixture(path: str, records: Iterable[RawTransactionRecord]) -> int:
    """
    Write records as JSON-lines, creating parent directories.

    Returns:
        Number of records written
    """
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(encode_record(record))
            f.write('\n')
            count += 1
    return count
