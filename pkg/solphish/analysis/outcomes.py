"""
Detection Outcomes

Separates real phishing from transfers between phishers, and scores
detections against ground-truth labels.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Set

from ..rules import Detection, PhishType
from ..txmodel import Address


class Outcome(Enum):
    PHISHING = 'Phishing'
    MUTUAL_TRANSFER = 'MutualTransfer'
    LAUNDERING = 'Laundering'


@dataclass
class OutcomeReport:
    """Per-detection outcomes (input order) and the gang candidates they reveal"""
    outcomes: List[Outcome]
    gang_candidates: List[Address]

    def counts(self) -> Dict[str, int]:
        tally = {o.value: 0 for o in Outcome}
        for outcome in self.outcomes:
            tally[outcome.value] += 1
        return tally


def classify_detections(detections: Iterable[Detection],
                        labeled_phishers: Set[str]) -> OutcomeReport:
    """
    Label each detection Phishing, MutualTransfer or Laundering.

    Phishing: the victim is not a labeled phisher. MutualTransfer: both
    ends are labeled. Laundering: a labeled victim pays an unlabeled
    account, which becomes a gang candidate.

    Args:
        detections: Detections to label
        labeled_phishers: Known phishing accounts; must not be empty

    Returns:
        OutcomeReport with candidates sorted ascending
    """
    if not labeled_phishers:
        raise ValueError('labeled phisher set is empty')

    outcomes = []
    candidates = set()
    for detection in detections:
        if detection.victim not in labeled_phishers:
            outcomes.append(Outcome.PHISHING)
        elif detection.phisher in labeled_phishers:
            outcomes.append(Outcome.MUTUAL_TRANSFER)
        else:
            outcomes.append(Outcome.LAUNDERING)
            candidates.add(detection.phisher)
    return OutcomeReport(outcomes=outcomes, gang_candidates=sorted(candidates))


@dataclass
class TypeEvaluation:
    """Detected / true-positive / expected counts for one phishing type"""
    phish_type: PhishType
    detected: int = 0
    true_positives: int = 0
    expected: int = 0

    @property
    def precision(self) -> float:
        return self.true_positives / self.detected if self.detected else 1.0

    @property
    def recall(self) -> float:
        return self.true_positives / self.expected if self.expected else 1.0

    def to_dict(self) -> Dict:
        return {
            'type': self.phish_type.value,
            'detected': self.detected,
            'true_positives': self.true_positives,
            'expected': self.expected,
            'precision': round(self.precision, 4),
            'recall': round(self.recall, 4),
        }


@dataclass
class EvaluationReport:
    per_type: Dict[PhishType, TypeEvaluation]
    exact_matches: int = 0
    transactions: int = 0
    false_positive_signatures: List[str] = field(default_factory=list)
    missed_signatures: List[str] = field(default_factory=list)

    @property
    def detected(self) -> int:
        return sum(e.detected for e in self.per_type.values())

    @property
    def true_positives(self) -> int:
        return sum(e.true_positives for e in self.per_type.values())

    @property
    def precision(self) -> float:
        return self.true_positives / self.detected if self.detected else 1.0

    @property
    def recall(self) -> float:
        expected = sum(e.expected for e in self.per_type.values())
        return self.true_positives / expected if expected else 1.0

    def to_dict(self) -> Dict:
        return {
            'transactions': self.transactions,
            'exact_matches': self.exact_matches,
            'precision': round(self.precision, 4),
            'recall': round(self.recall, 4),
            'per_type': [self.per_type[t].to_dict() for t in PhishType],
            'false_positives': self.false_positive_signatures,
            'missed': self.missed_signatures,
        }


def evaluate_detections(detections: Iterable[Detection],
                        expected: Mapping[str, Set[PhishType]]) -> EvaluationReport:
    """
    Score detections against ground truth.

    Args:
        detections: Classifier output
        expected: Signature to the set of types the transaction should
            carry (empty for non-phishing transactions)

    Returns:
        EvaluationReport with per-type and overall precision and recall
    """
    report = EvaluationReport(per_type={t: TypeEvaluation(t) for t in PhishType},
                              transactions=len(expected))
    for types in expected.values():
        for phish_type in types:
            report.per_type[phish_type].expected += 1

    found: Dict[str, Set[PhishType]] = {}
    for detection in detections:
        found[detection.tx_signature] = set(detection.phish_types)
        truth = expected.get(detection.tx_signature, set())
        for phish_type in detection.phish_types:
            report.per_type[phish_type].detected += 1
            if phish_type in truth:
                report.per_type[phish_type].true_positives += 1
        if not set(detection.phish_types) <= truth:
            report.false_positive_signatures.append(detection.tx_signature)

    for signature, truth in expected.items():
        got = found.get(signature, set())
        if got == truth:
            report.exact_matches += 1
        elif truth - got:
            report.missed_signatures.append(signature)
    return report
