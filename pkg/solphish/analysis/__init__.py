"""
Downstream Analyses

Temporal distribution, loss accounting, phisher statistics, detection
outcomes and gang graphs over a set of detections.
"""

from .errors import ConsistencyError, MissingHistory, PriceTableError
from .gangs import (
    EdgeKind,
    Gang,
    GangEdge,
    GangGraph,
    GangSummary,
    TopologyHint,
    build_gang_graph,
    find_gangs,
    summarize_gangs,
    topology_hint,
)
from .loss import (
    LossResult,
    LossSummary,
    attach_losses,
    compute_loss,
    loss_summary,
    round_usd,
    top_tokens,
)
from .outcomes import (
    EvaluationReport,
    Outcome,
    OutcomeReport,
    classify_detections,
    evaluate_detections,
)
from .phishers import PhisherStats, lifecycle_summary, phisher_stats, top_phishers
from .prices import PriceTable, fetch_price_table, load_price_table
from .report import (
    AnalysisReport,
    build_report,
    check_consistency,
    format_table,
    histogram_rows,
    partition_histories,
    write_histogram_csv,
    write_report_bundle,
)
from .temporal import daily_losses, monthly_histogram

__all__ = [
    'ConsistencyError', 'MissingHistory', 'PriceTableError',
    'EdgeKind', 'Gang', 'GangEdge', 'GangGraph', 'GangSummary', 'TopologyHint',
    'build_gang_graph', 'find_gangs', 'summarize_gangs', 'topology_hint',
    'LossResult', 'LossSummary', 'attach_losses', 'compute_loss', 'loss_summary', 'round_usd',
    'top_tokens',
    'EvaluationReport', 'Outcome', 'OutcomeReport', 'classify_detections', 'evaluate_detections',
    'PhisherStats', 'lifecycle_summary', 'phisher_stats', 'top_phishers',
    'PriceTable', 'fetch_price_table', 'load_price_table',
    'AnalysisReport', 'build_report', 'check_consistency', 'format_table', 'histogram_rows',
    'partition_histories', 'write_histogram_csv', 'write_report_bundle',
    'daily_losses', 'monthly_histogram',
]
