"""
Dataset Export

Turns detections and a gang report into the released dataset: the
phishing accounts, the phishing transactions and the gang edges, with
a manifest echoing the counts.
"""

import csv
import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..analysis import Outcome, classify_detections
from ..errors import SolPhishError
from ..ingest import format_timestamp
from ..rules import Detection, PhishType, RuleSet, match_vanity, write_detections
from ..txmodel import Address

logger = logging.getLogger(__name__)

ACCOUNTS_FILE = 'phishing_accounts.csv'
TRANSACTIONS_FILE = 'phishing_transactions.jsonl'
GANG_EDGES_FILE = 'gang_edges.csv'
MANIFEST_FILE = 'MANIFEST.json'

DETECTED = 'detected'
VANITY_DISCOVERED = 'vanity_discovered'
GANG_MEMBER = 'gang_member'
SOURCES = (DETECTED, VANITY_DISCOVERED, GANG_MEMBER)


class GangReportError(SolPhishError):
    """A gang report file does not follow the gangs.json layout."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


@dataclass
class DatasetAccount:
    address: Address
    source: str
    dominant_type: Optional[PhishType] = None
    first_seen: Optional[int] = None
    last_seen: Optional[int] = None

    def row(self) -> Tuple[str, str, str, str, str]:
        return (str(self.address), self.source,
                self.dominant_type.value if self.dominant_type else '',
                _iso(self.first_seen), _iso(self.last_seen))


@dataclass
class GangEdgeRow:
    gang: int
    source: Address
    target: Address
    kind: str
    count: int


def _iso(block_time: Optional[int]) -> str:
    if block_time is None:
        return ''
    return format_timestamp(datetime.fromtimestamp(block_time, tz=timezone.utc))


def read_gang_report(path: str) -> Tuple[List[List[Address]], List[GangEdgeRow]]:
    """
    Read the gangs.json written by the analysis report.

    Returns:
        (member lists, edges) in report order

    Raises:
        GangReportError: unreadable file or missing fields
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise GangReportError(path, e.strerror or str(e)) from None
    except json.JSONDecodeError as e:
        raise GangReportError(path, f"line {e.lineno}: {e.msg}") from None

    members: List[List[Address]] = []
    edges: List[GangEdgeRow] = []
    try:
        for position, gang in enumerate(data['gangs'], start=1):
            index = int(gang.get('gang', position))
            members.append([Address(m) for m in gang['members']])
            for edge in gang['edges']:
                edges.append(GangEdgeRow(index, Address(edge['from']), Address(edge['to']),
                                         str(edge['kind']), int(edge['count'])))
    except (KeyError, TypeError, ValueError) as e:
        raise GangReportError(path, f"bad gang entry: {e}") from None
    return members, edges


def _dominant(counts: Dict[PhishType, int]) -> PhishType:
    return min(counts, key=lambda t: (-counts[t], t.precedence))


def collect_accounts(detections: Sequence[Detection],
                     gang_members: Sequence[Sequence[str]] = (),
                     labeled_phishers: Optional[Set[str]] = None,
                     ruleset: Optional[RuleSet] = None) -> List[DatasetAccount]:
    """
    The dataset's phishing accounts, sorted by address.

    Every detection phisher is listed as detected, except an account a
    labeled phisher launders into whose address matches the vanity
    pattern: that one is vanity_discovered. Gang members found no other
    way are listed as gang_member.

    Args:
        detections: All detections of the run
        gang_members: Member lists from the gang report
        labeled_phishers: Known phishing accounts; enables the laundering pathway
        ruleset: Allowlist and vanity patterns (defaults when None)
    """
    discovered: Set[Address] = set()
    if labeled_phishers:
        ruleset = ruleset or RuleSet()
        candidates = classify_detections(detections, set(labeled_phishers)).gang_candidates
        discovered = {c for c in candidates
                      if match_vanity(c, ruleset.allowlist, ruleset.isa_prefix, ruleset.isa_suffix)}

    seen: Dict[Address, List[Detection]] = {}
    for detection in detections:
        seen.setdefault(detection.phisher, []).append(detection)

    accounts = {}
    for address, own in seen.items():
        counts: Dict[PhishType, int] = {}
        for detection in own:
            counts[detection.primary_type] = counts.get(detection.primary_type, 0) + 1
        times = [d.block_time for d in own]
        accounts[address] = DatasetAccount(
            address=address,
            source=VANITY_DISCOVERED if address in discovered else DETECTED,
            dominant_type=_dominant(counts),
            first_seen=min(times),
            last_seen=max(times),
        )
    for gang in gang_members:
        for member in gang:
            member = Address(member)
            if member not in accounts:
                accounts[member] = DatasetAccount(address=member, source=GANG_MEMBER)
    return [accounts[a] for a in sorted(accounts)]


def phishing_transactions(detections: Sequence[Detection],
                          labeled_phishers: Optional[Set[str]] = None) -> List[Detection]:
    """Detections that are phishing; with labels, transfers between or out of phishers are dropped."""
    if not labeled_phishers:
        return list(detections)
    outcomes = classify_detections(detections, set(labeled_phishers)).outcomes
    return [d for d, o in zip(detections, outcomes) if o is Outcome.PHISHING]


def _write_csv(path: str, headers: Sequence[str], rows):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(headers)
        writer.writerows(rows)


def write_dataset(output_dir: str, accounts: Sequence[DatasetAccount],
                  transactions: Sequence[Detection], edges: Sequence[GangEdgeRow],
                  gangs: int = 0) -> Dict:
    """
    Write the dataset files and MANIFEST.json.

    Returns:
        The manifest written
    """
    os.makedirs(output_dir, exist_ok=True)
    _write_csv(os.path.join(output_dir, ACCOUNTS_FILE),
               ['address', 'source', 'dominant_type', 'first_seen', 'last_seen'],
               [a.row() for a in accounts])
    write_detections(os.path.join(output_dir, TRANSACTIONS_FILE), transactions)
    _write_csv(os.path.join(output_dir, GANG_EDGES_FILE),
               ['gang', 'from', 'to', 'kind', 'count'],
               [(e.gang, e.source, e.target, e.kind, e.count) for e in edges])

    by_source = {source: 0 for source in SOURCES}
    for account in accounts:
        by_source[account.source] += 1
    by_type = {t.value: 0 for t in PhishType}
    for detection in transactions:
        by_type[detection.primary_type.value] += 1
    manifest = {
        'accounts': len(accounts),
        'accounts_by_source': by_source,
        'transactions': len(transactions),
        'transactions_by_type': by_type,
        'gangs': gangs,
        'gang_edges': len(edges),
        'files': [ACCOUNTS_FILE, TRANSACTIONS_FILE, GANG_EDGES_FILE],
    }
    with open(os.path.join(output_dir, MANIFEST_FILE), 'w', encoding='utf-8', newline='\n') as f:
        json.dump(manifest, f, indent=2)
        f.write('\n')
    logger.info("Exported %d account(s) and %d transaction(s) to %s",
                len(accounts), len(transactions), output_dir)
    return manifest
