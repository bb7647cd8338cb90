"""
Labeled Corpus

Generates the mixed oracle corpus: benign transfers, market activity,
self-dealing and the three phishing families, with scripted block
times, recurring phishers and post-phishing account activity. The
manifest records what the analyses should recover: per-label, per-month
and per-mint tallies and every phisher's life cycle.
"""

import calendar
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Dict, List, Mapping, Optional, Set, Union

import numpy as np

from ..analysis.report import write_histogram_csv
from ..ingest import format_timestamp, load_records, normalize, parse_timestamp, write_fixture
from ..rules import VANITY_PREFIX, PhishType
from ..txmodel import Address, Transaction
from .addresses import random_address, vanity_address
from .errors import CorpusWriteError
from .generators import (
    ISA_SUFFIX,
    Sample,
    gen_aat_phish,
    gen_benign_control,
    gen_benign_transfer,
    gen_isa_phish,
    gen_market_swap,
    gen_program_activity,
    gen_self_dealing,
    gen_stmt_phish,
)
from .labels import Label

logger = logging.getLogger(__name__)

SCHEMA_VERSION = '1'
DAY = 86400

DEFAULT_SEED = 42
DEFAULT_START = '2024-01-01'
DEFAULT_MONTHS = 6
DEFAULT_COUNTS = {
    Label.BENIGN: 400,
    Label.MARKET: 150,
    Label.SELF_DEALING: 50,
    Label.STMT: 134,
    Label.AAT_WALLET: 45,
    Label.AAT_TOKEN: 44,
    Label.AAT_BOTH: 44,
    Label.ISA: 133,
}

CONTROL_SHARE = 0.2
DURABLE_NONCE_SHARE = 0.25
MAX_DORMANT_DAYS = 120

STMT_POOL = 8
AAT_PROGRAM_POOL = 6
AAT_OWNER_POOL = 4
ISA_POOL = 6

TRANSACTIONS_FILE = 'transactions.jsonl'
LABELS_FILE = 'labels.json'
MANIFEST_FILE = 'manifest.json'
TALLY_FILE = 'monthly_tally.csv'
ACTIVITY_FILE = os.path.join('histories', 'activity.jsonl')


@dataclass
class LabeledCorpus:
    """
    Generated transactions, their labels and the generation manifest.

    activity holds later transactions of the phishing accounts; they are
    history, not part of the labeled set.
    """
    samples: List[Sample]
    manifest: Dict
    activity: List[Sample]

    def __post_init__(self):
        signatures = [s.signature for s in self.samples] + [s.signature for s in self.activity]
        if len(set(signatures)) != len(signatures):
            raise ValueError('corpus signatures are not unique')

    @property
    def transactions(self) -> List[Transaction]:
        return [s.transaction for s in self.samples]

    @property
    def labels(self) -> Dict[str, Label]:
        return {s.signature: s.label for s in self.samples}

    @property
    def histories(self) -> List[Transaction]:
        """Every transaction, labeled and activity, for lifecycle analysis"""
        return self.transactions + [s.transaction for s in self.activity]

    def expected_types(self) -> Dict[str, Set[PhishType]]:
        return {s.signature: s.label.expected_types() for s in self.samples}

    def phishers(self) -> Set[Address]:
        return {Address(p['account']) for p in self.manifest['phishers']}


def resolve_counts(counts: Optional[Mapping[Union[str, Label], int]]) -> Dict[Label, int]:
    """
    Per-label counts; labels missing from counts are zero.

    Raises:
        ValueError: unknown label or negative count
    """
    if counts is None:
        return dict(DEFAULT_COUNTS)
    resolved = {label: 0 for label in Label}
    for key, value in counts.items():
        label = key if isinstance(key, Label) else Label.parse(key)
        if int(value) < 0:
            raise ValueError(f"count for {label.value} must be >= 0, got {value}")
        resolved[label] = int(value)
    return resolved


def _start_timestamp(start: Union[str, int]) -> int:
    if isinstance(start, int):
        return start
    return int(parse_timestamp(start).timestamp())


def _add_months(timestamp: int, months: int) -> int:
    moment = datetime.fromtimestamp(timestamp, tz=timezone.utc)
    index = moment.month - 1 + months
    year, month = moment.year + index // 12, index % 12 + 1
    day = min(moment.day, calendar.monthrange(year, month)[1])
    return int(moment.replace(year=year, month=month, day=day).timestamp())


class _Pools:
    """Recurring phishing accounts, drawn with Zipf-like weights."""

    def __init__(self, rng: np.random.Generator):
        self.stmt = [random_address(rng) for _ in range(STMT_POOL)]
        self.aat_programs = [random_address(rng) for _ in range(AAT_PROGRAM_POOL)]
        self.aat_owners = [random_address(rng) for _ in range(AAT_OWNER_POOL)]
        self.isa = [vanity_address(rng, prefix=VANITY_PREFIX) if i % 2 == 0
                    else vanity_address(rng, suffix=ISA_SUFFIX) for i in range(ISA_POOL)]

    @staticmethod
    def pick(rng: np.random.Generator, pool: List[Address]) -> Address:
        weights = 1.0 / np.arange(1, len(pool) + 1)
        return pool[int(rng.choice(len(pool), p=weights / weights.sum()))]


def _scenario(rng: np.random.Generator, label: Label, block_time: int, pools: _Pools) -> Sample:
    if label is Label.BENIGN:
        if rng.random() < CONTROL_SHARE:
            return gen_benign_control(rng, block_time=block_time)
        return gen_benign_transfer(rng, block_time=block_time)
    if label is Label.MARKET:
        return gen_market_swap(rng, block_time=block_time)
    if label is Label.SELF_DEALING:
        return gen_self_dealing(rng, block_time=block_time)
    if label is Label.STMT:
        return gen_stmt_phish(rng, n_tokens=int(rng.integers(2, 5)),
                              durable_nonce=bool(rng.random() < DURABLE_NONCE_SHARE),
                              block_time=block_time, phisher=pools.pick(rng, pools.stmt))
    if label is Label.AAT_WALLET:
        return gen_aat_phish(rng, 'wallet', block_time=block_time,
                             phisher=pools.pick(rng, pools.aat_programs))
    if label is Label.AAT_TOKEN:
        return gen_aat_phish(rng, 'token', block_time=block_time,
                             phisher=pools.pick(rng, pools.aat_owners))
    if label is Label.AAT_BOTH:
        return gen_aat_phish(rng, 'both', block_time=block_time,
                             phisher=pools.pick(rng, pools.aat_programs))
    drain = 'sol' if rng.random() < 0.3 else 'token'
    return gen_isa_phish(rng, drain=drain, block_time=block_time,
                         phisher=pools.pick(rng, pools.isa))


def _activity(rng: np.random.Generator, samples: List[Sample], pools: _Pools) -> List[Sample]:
    """Later, non-phishing transactions of some phishers (the dormant period)."""
    last: Dict[str, int] = {}
    for sample in samples:
        if sample.label.is_phishing:
            phisher = sample.truth['phisher']
            last[phisher] = max(last.get(phisher, 0), sample.transaction.block_time)

    programs = set(pools.aat_programs)
    activity = []
    for phisher in sorted(last):
        dormant_days = int(rng.integers(0, MAX_DORMANT_DAYS + 1))
        if dormant_days == 0:
            continue
        block_time = last[phisher] + dormant_days * DAY + int(rng.integers(0, DAY))
        if phisher in programs:
            activity.append(gen_program_activity(rng, phisher, block_time))
        else:
            activity.append(gen_benign_transfer(rng, block_time=block_time, sender=phisher))
    return activity


def _month(block_time: int) -> str:
    moment = datetime.fromtimestamp(block_time, tz=timezone.utc)
    return f"{moment.year}-{moment.month:02d}"


def build_manifest(seed: Optional[int], counts: Mapping[Label, int], start: int, months: int,
                   samples: List[Sample], activity: List[Sample]) -> Dict:
    """Tallies of a generated corpus, in the layout the analysis reports use."""
    labels = {label.value: 0 for label in Label}
    for sample in samples:
        labels[sample.label.value] += 1

    phishing = [s for s in samples if s.label.is_phishing]
    monthly: Counter = Counter()
    mints: Counter = Counter()
    per_phisher: Dict[str, List[Sample]] = {}
    for sample in phishing:
        monthly[(_month(sample.transaction.block_time), sample.label.primary_type.value)] += 1
        mints.update(set(sample.truth['mints']))
        per_phisher.setdefault(sample.truth['phisher'], []).append(sample)

    last_seen: Dict[str, int] = {}
    for sample in activity:
        for account in (sample.truth.get('sender'), *[str(i.program) for i in
                                                      sample.transaction.instructions]):
            if account in per_phisher:
                last_seen[account] = max(last_seen.get(account, 0),
                                         sample.transaction.block_time)

    phishers = []
    for account, own in per_phisher.items():
        times = [s.transaction.block_time for s in own]
        types = Counter(s.label.primary_type for s in own)
        dominant = min(types, key=lambda t: (-types[t], t.precedence))
        first, last = min(times), max(times)
        last_activity = max(last, last_seen.get(account, last))
        phishers.append({
            'account': account,
            'dominant_type': dominant.value,
            'attempts': len(own),
            'first_phish': first,
            'last_phish': last,
            'last_activity': last_activity,
            'phishing_period': last - first,
            'dormant_period': last_activity - last,
        })
    phishers.sort(key=lambda p: (-p['attempts'], p['account']))

    return {
        'schema_version': SCHEMA_VERSION,
        'seed': seed,
        'parameters': {
            'counts': {label.value: counts.get(label, 0) for label in Label},
            'start': format_timestamp(datetime.fromtimestamp(start, tz=timezone.utc)),
            'months': months,
            'control_share': CONTROL_SHARE,
            'durable_nonce_share': DURABLE_NONCE_SHARE,
        },
        'transactions': len(samples),
        'activity_transactions': len(activity),
        'labels': labels,
        'phishing': len(phishing),
        'durable_nonce': sum(1 for s in phishing if s.truth.get('durable_nonce')),
        'monthly': [{'month': m, 'type': t, 'count': c} for (m, t), c in sorted(monthly.items())],
        'mints': [{'mint': m, 'detections': c}
                  for m, c in sorted(mints.items(), key=lambda item: (-item[1], item[0]))],
        'phishers': phishers,
    }


def generate_corpus(seed: int = DEFAULT_SEED,
                    counts: Optional[Mapping[Union[str, Label], int]] = None,
                    start: Union[str, int] = DEFAULT_START,
                    months: int = DEFAULT_MONTHS) -> LabeledCorpus:
    """
    Generate a labeled corpus.

    Labels are shuffled, then given sorted random block times spread
    over the window, so the corpus reads in time order.

    Args:
        seed: Random seed; the corpus is a pure function of the arguments
        counts: Transactions per label (default: 1,000 mixed)
        start: Window start, ISO date or UNIX time
        months: Window length in calendar months

    Returns:
        LabeledCorpus with its manifest

    Raises:
        ValueError: bad counts or window
    """
    if months < 1:
        raise ValueError(f"months must be >= 1, got {months}")
    resolved = resolve_counts(counts)
    rng = np.random.default_rng(seed)
    start_ts = _start_timestamp(start)
    end_ts = _add_months(start_ts, months)

    labels = [label for label in Label for _ in range(resolved[label])]
    order = rng.permutation(len(labels))
    times = np.sort(rng.integers(start_ts, end_ts, size=len(labels)))
    pools = _Pools(rng)

    samples: List[Sample] = []
    seen: Set[str] = set()
    for position, block_time in zip(order, times):
        label = labels[int(position)]
        sample = _scenario(rng, label, int(block_time), pools)
        while sample.signature in seen:
            sample = _scenario(rng, label, int(block_time), pools)
        if sample.label is not label:
            raise AssertionError(f"generated {sample.label.value} for a {label.value} slot")
        seen.add(sample.signature)
        samples.append(sample)

    activity = _activity(rng, samples, pools)
    manifest = build_manifest(seed, resolved, start_ts, months, samples, activity)
    logger.info("Generated %d transaction(s), %d phishing, %d activity",
                len(samples), manifest['phishing'], len(activity))
    return LabeledCorpus(samples=samples, manifest=manifest, activity=activity)


def _write_json(path: str, data):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write('\n')


def write_corpus(corpus: LabeledCorpus, directory: str) -> str:
    """
    Write a corpus as ingest-compatible JSON-lines plus sidecar files.

    Layout:
        transactions.jsonl        labeled transactions
        labels.json               signature -> label
        manifest.json             generation parameters and tallies
        monthly_tally.csv         month,type,count (same format as the analysis report)
        histories/activity.jsonl  phisher activity after the corpus

    Returns:
        Path of manifest.json

    Raises:
        CorpusWriteError: naming the file that could not be written
    """
    path = directory
    try:
        os.makedirs(os.path.join(directory, 'histories'), exist_ok=True)
        path = os.path.join(directory, TRANSACTIONS_FILE)
        write_fixture(path, (s.record for s in corpus.samples))
        path = os.path.join(directory, ACTIVITY_FILE)
        write_fixture(path, (s.record for s in corpus.activity))
        path = os.path.join(directory, LABELS_FILE)
        _write_json(path, {
            'schema_version': SCHEMA_VERSION,
            'labels': {s.signature: s.label.value for s in corpus.samples},
        })
        path = os.path.join(directory, TALLY_FILE)
        write_histogram_csv(path, [(m['month'], m['type'], m['count'])
                                   for m in corpus.manifest['monthly']])
        path = os.path.join(directory, MANIFEST_FILE)
        _write_json(path, corpus.manifest)
    except OSError as e:
        raise CorpusWriteError(path, e.strerror or str(e)) from None
    logger.info("Wrote corpus of %d transaction(s) to %s", len(corpus.samples), directory)
    return path


def read_labels(path: str) -> Dict[str, Label]:
    """Signature -> Label from a labels.json sidecar."""
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    return {signature: Label.parse(value) for signature, value in data['labels'].items()}


def read_corpus(directory: str) -> LabeledCorpus:
    """
    Reload a corpus written by write_corpus. Ground-truth details beyond
    the label are not persisted, so samples come back with empty truth.

    Raises:
        MalformedPayload: a transaction line does not parse
        ValueError: labels and transactions disagree
    """
    labels = read_labels(os.path.join(directory, LABELS_FILE))
    with open(os.path.join(directory, MANIFEST_FILE), 'r', encoding='utf-8') as f:
        manifest = json.load(f)

    samples = []
    for record in load_records(os.path.join(directory, TRANSACTIONS_FILE)):
        if record.signature not in labels:
            raise ValueError(f"transaction {record.signature} has no label")
        samples.append(Sample(record, normalize(record), labels[record.signature]))
    if len(samples) != len(labels):
        raise ValueError(f"{len(labels)} labels for {len(samples)} transactions")

    activity = []
    activity_path = os.path.join(directory, ACTIVITY_FILE)
    if os.path.exists(activity_path):
        activity = [Sample(r, normalize(r), Label.BENIGN) for r in load_records(activity_path)]
    return LabeledCorpus(samples=samples, manifest=manifest, activity=activity)
