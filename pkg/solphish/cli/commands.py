"""
Commands

The four operator commands. Each takes a RunConfig plus its own inputs,
writes machine-readable files under the output directory, prints a
human summary on stdout and returns the process exit code. Library
errors are turned into exit code 1 here and nowhere else.
"""

import glob
import logging
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Set

from ..analysis import (
    ConsistencyError,
    build_report,
    classify_detections,
    write_report_bundle,
)
from ..errors import SolPhishError
from ..ingest import (
    MalformedPayload,
    RawTransactionRecord,
    RpcClient,
    load_records,
    normalize,
    write_fixture,
)
from ..rules import (
    ClassificationRun,
    PhishType,
    classify_all,
    read_detections,
    write_detections,
)
from ..synth import generate_corpus, read_labels, write_corpus
from ..txmodel import Address, Transaction
from .config import RunConfig
from .errors import ConfigError
from .export import (
    GANG_MEMBER,
    VANITY_DISCOVERED,
    collect_accounts,
    phishing_transactions,
    read_gang_report,
    write_dataset,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DETECTIONS = 2

DETECTIONS_FILE = 'detections.jsonl'
SCAN_HISTORY_FILE = os.path.join('histories', 'scan.jsonl')
DEFAULT_SCAN_LIMIT = 1000
BANNER_WIDTH = 60


def _banner(title: str):
    print("=" * BANNER_WIDTH)
    print(f"  {title}")
    print("=" * BANNER_WIDTH)


def _fail(error: Exception) -> int:
    logger.debug("Command failed", exc_info=True)
    print(f"Error: {error}", file=sys.stderr)
    return EXIT_FAILURE


@dataclass
class ScanResult:
    """What a scan produced; cmd_scan prints it"""
    run: ClassificationRun
    detections_path: str
    history_path: str
    malformed: int = 0
    outcomes: Optional[Dict[str, int]] = None


def collect_records(config: RunConfig, account: Optional[str] = None,
                    signature: Optional[str] = None, fixture: Optional[str] = None,
                    limit: int = DEFAULT_SCAN_LIMIT,
                    client: Optional[RpcClient] = None) -> List[RawTransactionRecord]:
    """
    Raw records for exactly one scan target.

    Raises:
        ConfigError: no target, several targets, or a network target without rpc_url
        IngestError: the fetch or the fixture read failed
    """
    targets = [t for t in (account, signature, fixture) if t]
    if len(targets) != 1:
        raise ConfigError('target', 'give exactly one of --account, --tx, --fixture')
    if fixture:
        return load_records(fixture)

    if client is None:
        client = RpcClient(config.ingest_config())
    if account:
        return client.ingest_account(str(Address(account)), limit)
    return [client.fetch_transaction(signature)]


def scan_records(records: List[RawTransactionRecord], config: RunConfig) -> ScanResult:
    """
    Normalize, classify and persist a batch of records.

    A record that does not normalize is logged and counted, and the rest
    of the batch is still scanned.

    Raises:
        ListFileError: a configured list file is unreadable
        OSError: the output directory is not writable
    """
    ruleset = config.ruleset()
    transactions: List[Transaction] = []
    kept: List[RawTransactionRecord] = []
    malformed = 0
    for record in records:
        try:
            transactions.append(normalize(record))
            kept.append(record)
        except MalformedPayload as e:
            malformed += 1
            logger.warning("Skipping %s: %s", record.signature, e)

    run = classify_all(transactions, ruleset)

    detections_path = os.path.join(config.output_dir, DETECTIONS_FILE)
    history_path = os.path.join(config.output_dir, SCAN_HISTORY_FILE)
    write_detections(detections_path, run.detections)
    write_fixture(history_path, kept)
    logger.info("Wrote %d detection(s) to %s", len(run.detections), detections_path)

    outcomes = None
    labeled = config.labeled_phishers()
    if labeled:
        outcomes = classify_detections(run.detections, set(labeled)).counts()
    return ScanResult(run=run, detections_path=detections_path, history_path=history_path,
                      malformed=malformed, outcomes=outcomes)


def cmd_scan(config: RunConfig, account: Optional[str] = None, signature: Optional[str] = None,
             fixture: Optional[str] = None, limit: int = DEFAULT_SCAN_LIMIT,
             client: Optional[RpcClient] = None) -> int:
    """
    Scan an account's history, one transaction or a fixture file.

    Returns:
        0 when nothing was flagged, 2 when at least one detection was
        written, 1 on any failure
    """
    source = f"account {account}" if account else f"tx {signature}" if signature else \
        f"fixture {fixture}"
    try:
        records = collect_records(config, account, signature, fixture, limit, client)
        result = scan_records(records, config)
    except (SolPhishError, OSError) as e:
        return _fail(e)

    run = result.run
    _banner('SolPhish Scan')
    print(f"Source:        {source}")
    print(f"Transactions:  {run.scanned}")
    if result.malformed:
        print(f"Malformed:     {result.malformed}")
    print(f"Detections:    {len(run.detections)}")
    for phish_type, count in run.type_counts().items():
        print(f"  {phish_type:<5} {count}")
    print(f"Durable nonce: {run.durable_nonce_count}")
    if run.skipped:
        print("Not flagged:   " + ", ".join(f"{reason}={count}"
                                              for reason, count in sorted(run.skipped.items())))
    if result.outcomes is not None:
        print("Outcomes:      " + ", ".join(f"{name}={count}"
                                              for name, count in result.outcomes.items()))
    print(f"Written:       {result.detections_path}")
    print("=" * BANNER_WIDTH)
    return EXIT_DETECTIONS if run.detections else EXIT_OK


def load_histories(directory: str) -> List[Transaction]:
    """
    Every transaction in the *.jsonl files under directory, in file then
    line order.

    Raises:
        MalformedPayload: a file does not parse
    """
    transactions = []
    for path in sorted(glob.glob(os.path.join(directory, '**', '*.jsonl'), recursive=True)):
        records = load_records(path)
        transactions.extend(normalize(r) for r in records)
        logger.info("Loaded %d history transaction(s) from %s", len(records), path)
    return transactions


def expected_from_labels(path: str) -> Dict[str, Set[PhishType]]:
    """Signature -> expected phishing types, from a synthetic labels.json."""
    return {signature: label.expected_types() for signature, label in read_labels(path).items()}


def cmd_analyze(config: RunConfig, detections_path: str, histories_dir: Optional[str] = None,
                labels_path: Optional[str] = None, plots: bool = False) -> int:
    """
    Run every analysis over a detections file and write the report bundle.

    Returns:
        0 on success, 1 when an input is unreadable or a report
        invariant does not hold
    """
    try:
        detections = read_detections(detections_path)
        transactions = load_histories(histories_dir) if histories_dir else []
        expected: Optional[Mapping[str, Set[PhishType]]] = None
        if labels_path:
            expected = expected_from_labels(labels_path)
        report = build_report(detections, transactions, prices=config.price_table(),
                              labeled_phishers=config.labeled_phishers(), expected=expected)
        written = write_report_bundle(report, config.output_dir, plots=plots)
    except ConsistencyError as e:
        print(f"Invariant violated: {e.invariant}: {e.detail}", file=sys.stderr)
        return EXIT_FAILURE
    except (SolPhishError, OSError, KeyError, ValueError) as e:
        return _fail(e)

    _banner('SolPhish Analysis')
    print(f"Detections:    {len(report.detections)}")
    print(f"Histories:     {len(transactions)}")
    print(f"Phishers:      {len(report.phishers)}")
    print(f"Total loss:    ${report.losses.total:.2f}")
    if report.unpriced:
        print(f"Unpriced:      {sum(report.unpriced.values())} asset transfer(s)")
    print(f"Gangs:         {len(report.gangs)}")
    if report.evaluation is not None:
        print(f"Precision:     {report.evaluation.precision:.4f}")
        print(f"Recall:        {report.evaluation.recall:.4f}")
    print(f"Files:         {len(written)} under {config.output_dir}")
    print("=" * BANNER_WIDTH)
    return EXIT_OK


def cmd_export(config: RunConfig, detections_path: str,
               gang_report_path: Optional[str] = None) -> int:
    """
    Write the phishing dataset: accounts, transactions and gang edges.

    Returns:
        0 on success, 1 when an input violates its schema
    """
    try:
        detections = read_detections(detections_path)
        members, edges = read_gang_report(gang_report_path) if gang_report_path else ([], [])
        labeled = config.labeled_phishers()
        accounts = collect_accounts(detections, members, labeled, config.ruleset())
        transactions = phishing_transactions(detections, labeled)
        manifest = write_dataset(config.output_dir, accounts, transactions, edges,
                                 gangs=len(members))
    except (SolPhishError, OSError) as e:
        return _fail(e)

    by_source = manifest['accounts_by_source']
    _banner('SolPhish Dataset Export')
    print(f"Accounts:      {manifest['accounts']} ({by_source[VANITY_DISCOVERED]} vanity "
          f"discovered, {by_source[GANG_MEMBER]} gang members)")
    print(f"Transactions:  {manifest['transactions']}")
    print(f"Gang edges:    {manifest['gang_edges']}")
    print(f"Written to:    {config.output_dir}")
    print("=" * BANNER_WIDTH)
    return EXIT_OK


def cmd_synth(seed: int, counts: Optional[Mapping[str, int]], out: str) -> int:
    """
    Generate a labeled synthetic corpus into out.

    Args:
        seed: Random seed
        counts: Label to count (missing labels are zero); None for the default mix
        out: Corpus directory

    Returns:
        0 on success, 1 on bad counts or a write failure
    """
    try:
        corpus = generate_corpus(seed=seed, counts=counts)
        manifest_path = write_corpus(corpus, out)
    except (SolPhishError, ValueError) as e:
        return _fail(e)

    manifest = corpus.manifest
    _banner('SolPhish Synthetic Corpus')
    print(f"Seed:          {seed}")
    print(f"Transactions:  {manifest['transactions']}")
    for label, count in manifest['labels'].items():
        print(f"  {label:<12} {count}")
    print(f"Phishing:      {manifest['phishing']}")
    print(f"Phishers:      {len(manifest['phishers'])}")
    print(f"Manifest:      {manifest_path}")
    print("=" * BANNER_WIDTH)
    return EXIT_OK
