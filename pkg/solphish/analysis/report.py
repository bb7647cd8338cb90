"""
Report Bundle

Runs every analysis over a set of detections and account histories,
checks the reports' internal consistency and writes them out as JSON,
aligned text tables and plot-data CSV files.
"""

import csv
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from ..rules import Detection, PhishType
from ..txmodel import Address, Transaction, involved_accounts
from .errors import ConsistencyError
from .gangs import Gang, GangSummary, build_gang_graph, find_gangs, summarize_gangs
from .loss import LossSummary, attach_losses, loss_summary, round_usd, top_tokens
from .outcomes import EvaluationReport, OutcomeReport, classify_detections, evaluate_detections
from .phishers import PhisherStats, lifecycle_summary, phisher_stats, top_phishers
from .prices import PriceTable
from .temporal import daily_losses, monthly_histogram

logger = logging.getLogger(__name__)

TOP_K = 10


@dataclass
class AnalysisReport:
    detections: List[Detection]
    histogram: Dict[Tuple[int, int], Dict[str, int]]
    daily: Dict[Tuple[str, str], Decimal]
    losses: LossSummary
    tokens: List[Tuple[str, int]]
    phishers: List[PhisherStats]
    lifecycle: Dict
    gangs: List[Gang]
    gang_summaries: List[GangSummary]
    unpriced: Counter = field(default_factory=Counter)
    outcomes: Optional[OutcomeReport] = None
    evaluation: Optional[EvaluationReport] = None


def partition_histories(transactions: Iterable[Transaction],
                        accounts: Iterable[str]) -> Dict[Address, List[Transaction]]:
    """Each account's transactions among those given, block-time ordered."""
    wanted = {Address(a) for a in accounts}
    histories: Dict[Address, List[Transaction]] = {}
    for tx in transactions:
        for account in involved_accounts(tx) & wanted:
            histories.setdefault(account, []).append(tx)
    for history in histories.values():
        history.sort(key=lambda tx: (tx.block_time, tx.signature))
    return histories


def build_report(detections: Sequence[Detection], transactions: Sequence[Transaction],
                 prices: Optional[PriceTable] = None,
                 labeled_phishers: Optional[Set[str]] = None,
                 expected: Optional[Mapping[str, Set[PhishType]]] = None) -> AnalysisReport:
    """
    Run every analysis.

    Args:
        detections: Detections to analyze
        transactions: Account histories; must include the detections' transactions
            for losses to be computed
        prices: Price snapshot (losses stay empty without one)
        labeled_phishers: Known phishing accounts for outcome classification
            and the gang graph; detected phishers are used when omitted
        expected: Ground-truth types per signature, for evaluation

    Returns:
        AnalysisReport (not yet consistency-checked)
    """
    by_signature = {}
    for tx in transactions:
        by_signature.setdefault(tx.signature, tx)

    unpriced: Counter = Counter()
    if prices is not None:
        detections, unpriced = attach_losses(detections, by_signature, prices)
    detections = list(detections)

    outcomes = None
    candidates: List[Address] = []
    if labeled_phishers:
        outcomes = classify_detections(detections, labeled_phishers)
        candidates = outcomes.gang_candidates
        labeled = set(labeled_phishers)
    else:
        labeled = {d.phisher for d in detections}

    phishers = sorted({d.phisher for d in detections})
    histories = partition_histories(by_signature.values(), phishers)
    stats = phisher_stats(detections, histories)
    as_of = max((tx.block_time for tx in by_signature.values()),
                default=max((d.block_time for d in detections), default=0))

    graph = build_gang_graph(labeled, by_signature.values(), candidates)
    gangs = find_gangs(graph)

    return AnalysisReport(
        detections=detections,
        histogram=monthly_histogram(detections),
        daily=daily_losses(detections),
        losses=loss_summary(detections),
        tokens=top_tokens(detections, TOP_K),
        phishers=stats,
        lifecycle=lifecycle_summary(stats, as_of),
        gangs=gangs,
        gang_summaries=summarize_gangs(gangs, detections),
        unpriced=unpriced,
        outcomes=outcomes,
        evaluation=evaluate_detections(detections, expected) if expected is not None else None,
    )


def check_consistency(report: AnalysisReport):
    """
    Assert the invariants the reports must satisfy.

    Raises:
        ConsistencyError: naming the first violated invariant
    """
    n = len(report.detections)
    bucketed = sum(sum(counts.values()) for counts in report.histogram.values())
    if bucketed != n:
        raise ConsistencyError('histogram conservation', f"{bucketed} bucketed, {n} detections")
    attempts = sum(s.attempts for s in report.phishers)
    if attempts != n:
        raise ConsistencyError('attempt conservation', f"{attempts} attempts, {n} detections")
    report.losses.check()
    for stats in report.phishers:
        if stats.phishing_period < 0 or stats.dormant_period < 0:
            raise ConsistencyError('non-negative periods', str(stats.account))
    seen: Dict[Address, int] = {}
    for i, gang in enumerate(report.gangs):
        for member in gang.members:
            if member in seen:
                raise ConsistencyError('gang partition', f"{member} in gangs {seen[member]} and {i}")
            seen[member] = i
        for edge in gang.edges:
            if edge.source not in gang.members or edge.target not in gang.members:
                raise ConsistencyError('gang partition', f"edge {edge.source}->{edge.target}")


def format_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Left-aligned text table with a dashed rule under the header."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ['  '.join(c.ljust(w) for c, w in zip(cells[0], widths)).rstrip(),
             '  '.join('-' * w for w in widths)]
    for row in cells[1:]:
        lines.append('  '.join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return '\n'.join(lines)


def _write_csv(path: str, headers: Sequence[str], rows: Iterable[Sequence[object]]):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(headers)
        writer.writerows(rows)


def _write_json(path: str, data):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write('\n')


def histogram_rows(histogram: Dict[Tuple[int, int], Dict[str, int]]) -> List[Tuple[str, str, int]]:
    """(month, type, count) rows with non-zero counts, month then type ascending."""
    return [(f"{year}-{month:02d}", phish_type, count)
            for (year, month), counts in sorted(histogram.items())
            for phish_type, count in sorted(counts.items()) if count]


def write_histogram_csv(path: str, rows: Iterable[Tuple[str, str, int]]):
    _write_csv(path, ['month', 'type', 'count'], rows)


def report_to_dict(report: AnalysisReport) -> Dict:
    data = {
        'detections': len(report.detections),
        'monthly_histogram': [{'month': m, 'type': t, 'count': c}
                              for m, t, c in histogram_rows(report.histogram)],
        'losses': report.losses.to_dict(),
        'unpriced_assets': dict(sorted(report.unpriced.items())),
        'top_tokens': [{'asset': a, 'detections': c} for a, c in report.tokens],
        'phishers': [s.to_dict() for s in report.phishers],
        'lifecycle': report.lifecycle,
        'gangs': [s.to_dict() for s in report.gang_summaries],
    }
    if report.outcomes is not None:
        data['outcomes'] = {
            'counts': report.outcomes.counts(),
            'gang_candidates': [str(a) for a in report.outcomes.gang_candidates],
        }
    if report.evaluation is not None:
        data['evaluation'] = report.evaluation.to_dict()
    return data


def render_text(report: AnalysisReport) -> str:
    """Human-readable tables for every analysis."""
    sections = []

    sections.append('Monthly detections\n' + format_table(
        ['month', 'type', 'count'], histogram_rows(report.histogram)))

    loss_rows = [(t.phish_type.value, t.count, round_usd(t.total), round_usd(t.average),
                  round_usd(t.highest)) for t in report.losses.per_type.values()]
    loss_rows.append(('ALL', report.losses.count, round_usd(report.losses.total),
                      round_usd(report.losses.average), ''))
    sections.append('Losses (USD)\n' + format_table(
        ['type', 'count', 'total', 'average', 'highest'], loss_rows))

    sections.append(f"Top {TOP_K} targeted tokens\n" + format_table(
        ['rank', 'mint', 'detections'],
        [(i + 1, asset, count) for i, (asset, count) in enumerate(report.tokens)]))

    for by in ('attempts', 'loss'):
        ranked = top_phishers(report.phishers, TOP_K, by=by)
        sections.append(f"Top {TOP_K} phishers by {by}\n" + format_table(
            ['account', 'attempts', 'loss_usd', 'type', 'phishing_days', 'dormant_days'],
            [(s.account, s.attempts, round_usd(s.total_loss_usd), s.dominant_type.value,
              round(s.phishing_period / 86400, 1), round(s.dormant_period / 86400, 1))
             for s in ranked]))

    sections.append('Gangs\n' + format_table(
        ['gang', 'size', 'topology', 'edges', 'detections', 'loss_usd'],
        [(s.index, len(s.gang.members), s.gang.topology.value, len(s.gang.edges),
          s.detections, round_usd(s.loss_usd)) for s in report.gang_summaries]))

    if report.outcomes is not None:
        sections.append('Detection outcomes\n' + format_table(
            ['outcome', 'count'], sorted(report.outcomes.counts().items())))
    if report.evaluation is not None:
        sections.append('Evaluation\n' + format_table(
            ['type', 'detected', 'true_positives', 'expected', 'precision', 'recall'],
            [(e['type'], e['detected'], e['true_positives'], e['expected'], e['precision'],
              e['recall']) for e in report.evaluation.to_dict()['per_type']]))
    return '\n\n'.join(sections) + '\n'


def write_report_bundle(report: AnalysisReport, output_dir: str, plots: bool = False) -> List[str]:
    """
    Check consistency, then write every report file under output_dir.

    Args:
        report: Output of build_report
        output_dir: Destination directory (created if needed)
        plots: Also render PNG figures

    Returns:
        Paths written, in write order

    Raises:
        ConsistencyError: before anything is written
    """
    check_consistency(report)
    os.makedirs(output_dir, exist_ok=True)
    written = []

    def path(name: str) -> str:
        full = os.path.join(output_dir, name)
        written.append(full)
        return full

    write_histogram_csv(path('monthly_histogram.csv'), histogram_rows(report.histogram))
    _write_csv(path('daily_losses.csv'), ['date', 'type', 'loss_usd'],
               [(day, t, round_usd(v)) for (day, t), v in report.daily.items()])
    _write_csv(path('phisher_stats.csv'),
               ['account', 'attempts', 'total_loss_usd', 'dominant_type', 'first_phish',
                'last_phish', 'last_activity', 'phishing_period', 'dormant_period',
                'history_missing'],
               [(s.account, s.attempts, round_usd(s.total_loss_usd), s.dominant_type.value,
                 s.first_phish, s.last_phish, s.last_activity, s.phishing_period,
                 s.dormant_period, s.history_missing) for s in report.phishers])
    _write_json(path('gangs.json'), {'gangs': [s.to_dict() for s in report.gang_summaries]})
    _write_json(path('summary.json'), report_to_dict(report))
    with open(path('report.txt'), 'w', encoding='utf-8', newline='\n') as f:
        f.write(render_text(report))

    if plots:
        from .plots import render_daily_losses, render_lifecycles, render_monthly_histogram
        render_monthly_histogram(report.histogram, path('monthly_histogram.png'))
        render_daily_losses(report.daily, path('daily_losses.png'))
        render_lifecycles(report.phishers, path('lifecycles.png'))

    logger.info("Wrote %d report file(s) to %s", len(written), output_dir)
    return written
