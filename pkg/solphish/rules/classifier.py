"""
Transaction Classifier

Assembles roles, prerequisites and the three detectors into a single
decision per transaction. Prerequisites are evaluated once per rule
family: authority-like roles gate AAT, transfer-like roles gate STMT
and ISA.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..txmodel import (
    Address,
    RoleUnderdetermined,
    Roles,
    RuleFamily,
    Transaction,
    derive_roles,
    holder_outflows,
)
from .detection import Detection, PhishType
from .detectors import VANITY_PREFIX, VANITY_SUFFIX, detect_aat, detect_isa, detect_stmt
from .lists import MarketList, OfficialAllowlist, default_official_allowlist
from .prerequisites import check_prerequisites

logger = logging.getLogger(__name__)

FAILED = 'failed'
ROLE_UNDERDETERMINED = 'role_underdetermined'
BENIGN_PROGRAM = 'benign_program'
NO_RULE = 'no_rule'


@dataclass(frozen=True)
class RuleSet:
    """
    Everything classify needs besides the transaction.

    benign_programs suppresses AAT when every new owner is a listed
    program; it is empty by default.
    """
    markets: MarketList = field(default_factory=MarketList)
    allowlist: OfficialAllowlist = field(default_factory=default_official_allowlist)
    benign_programs: FrozenSet[Address] = frozenset()
    isa_prefix: str = VANITY_PREFIX
    isa_suffix: str = VANITY_SUFFIX

    def classify(self, tx: Transaction) -> Optional[Detection]:
        return classify(tx, self.markets, self.allowlist, self.benign_programs,
                        isa_suffix=self.isa_suffix, isa_prefix=self.isa_prefix)


@dataclass
class ClassificationRun:
    """Detections in input order plus why the other transactions were not flagged"""
    detections: List[Detection]
    scanned: int
    skipped: Counter

    @property
    def durable_nonce_count(self) -> int:
        return sum(1 for d in self.detections if d.durable_nonce)

    def type_counts(self) -> Dict[str, int]:
        counts = {t.value: 0 for t in PhishType}
        for detection in self.detections:
            for phish_type in detection.phish_types:
                counts[phish_type.value] += 1
        return counts


def classify(tx: Transaction, markets: MarketList, allowlist: OfficialAllowlist,
             benign_programs: Iterable[str] = frozenset(), isa_suffix: str = VANITY_SUFFIX,
             isa_prefix: str = VANITY_PREFIX) -> Optional[Detection]:
    """
    Classify one transaction.

    Args:
        tx: Normalized transaction
        markets: Market addresses and keywords
        allowlist: Official accounts exempt from the vanity match
        benign_programs: Programs whose Assign/SetAuthority is not phishing
        isa_suffix: Vanity suffix pattern
        isa_prefix: Vanity prefix pattern

    Returns:
        A Detection carrying every fired type, or None
    """
    detection, _ = _evaluate(tx, markets, allowlist, frozenset(benign_programs),
                             isa_prefix, isa_suffix)
    return detection


def classify_all(transactions: Iterable[Transaction], ruleset: RuleSet) -> ClassificationRun:
    """
    Classify a corpus, keeping input order.

    Args:
        transactions: Transactions to scan
        ruleset: Lists and patterns to apply

    Returns:
        ClassificationRun with detections and a tally of non-detection reasons
    """
    detections = []
    skipped: Counter = Counter()
    scanned = 0
    benign = frozenset(ruleset.benign_programs)
    for tx in transactions:
        scanned += 1
        detection, reason = _evaluate(tx, ruleset.markets, ruleset.allowlist, benign,
                                      ruleset.isa_prefix, ruleset.isa_suffix)
        if detection is not None:
            detections.append(detection)
        else:
            skipped[reason] += 1
    logger.info("Classified %d transaction(s): %d detection(s)", scanned, len(detections))
    return ClassificationRun(detections=detections, scanned=scanned, skipped=skipped)


def _evaluate(tx: Transaction, markets: MarketList, allowlist: OfficialAllowlist,
              benign_programs: FrozenSet[str], isa_prefix: str,
              isa_suffix: str) -> Tuple[Optional[Detection], str]:
    if not tx.success:
        return None, FAILED

    try:
        authority_roles = derive_roles(tx, RuleFamily.AUTHORITY_LIKE)
        transfer_roles = derive_roles(tx, RuleFamily.TRANSFER_LIKE)
    except RoleUnderdetermined:
        logger.debug("%s: roles underdetermined, not detectable", tx.signature)
        return None, ROLE_UNDERDETERMINED

    evidence = {}
    reason = NO_RULE

    aat = detect_aat(tx)
    if aat is not None:
        verdict = check_prerequisites(tx, authority_roles, markets)
        new_owners = {r['new_owner'] for r in aat['reassignments']}
        if not verdict:
            logger.debug("%s: AAT rejected (%s)", tx.signature, verdict.reason.value)
            reason = verdict.reason.value
        elif benign_programs and new_owners <= benign_programs:
            logger.debug("%s: AAT to benign program(s) %s", tx.signature, sorted(new_owners))
            reason = BENIGN_PROGRAM
        else:
            evidence[PhishType.AAT] = aat

    stmt = detect_stmt(tx)
    isa = detect_isa(tx, allowlist, transfer_roles, isa_prefix, isa_suffix)
    if stmt is not None or isa is not None:
        verdict = check_prerequisites(tx, transfer_roles, markets)
        if verdict:
            if stmt is not None:
                evidence[PhishType.STMT] = stmt
            if isa is not None:
                evidence[PhishType.ISA] = isa
        else:
            logger.debug("%s: transfer rules rejected (%s)", tx.signature, verdict.reason.value)
            reason = verdict.reason.value

    if not evidence:
        return None, reason

    types = PhishType.ordered(evidence)
    roles = authority_roles if types[0] is PhishType.AAT else transfer_roles
    return Detection(
        tx_signature=tx.signature,
        phish_types=types,
        victim=roles.loser,
        phisher=roles.beneficiary,
        evidence={t.value: evidence[t] for t in types},
        slot=tx.slot,
        block_time=tx.block_time,
        assets=_involved_assets(tx, types, evidence, transfer_roles),
    ), ''


def _involved_assets(tx: Transaction, types: List[PhishType], evidence: Dict,
                     transfer_roles: Roles) -> List[str]:
    """Asset keys the detection concerns, in balance-table order."""
    keys: List[str] = []

    def add(key: str):
        if key not in keys:
            keys.append(key)

    if PhishType.AAT in types:
        reassigned = {r['account'] for r in evidence[PhishType.AAT]['reassignments']}
        for entry in tx.balances:
            if entry.account in reassigned and (entry.pre or entry.post):
                add(entry.asset.key)
    if PhishType.STMT in types or PhishType.ISA in types:
        for entry, _ in holder_outflows(tx, transfer_roles.loser):
            add(entry.asset.key)
    return keys
