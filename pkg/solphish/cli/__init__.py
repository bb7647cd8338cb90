"""
Command Surface

Run configuration, the scan / analyze / export / synth commands and the
dataset export writers behind them. main.py parses flags and calls in
here.
"""

from .commands import (
    DETECTIONS_FILE,
    EXIT_DETECTIONS,
    EXIT_FAILURE,
    EXIT_OK,
    ScanResult,
    cmd_analyze,
    cmd_export,
    cmd_scan,
    cmd_synth,
    collect_records,
    expected_from_labels,
    load_histories,
    scan_records,
)
from .config import RPC_URL_ENV, RunConfig, load_run_config
from .errors import ConfigError
from .export import (
    DatasetAccount,
    GangEdgeRow,
    GangReportError,
    collect_accounts,
    phishing_transactions,
    read_gang_report,
    write_dataset,
)

__all__ = [
    'DETECTIONS_FILE', 'EXIT_DETECTIONS', 'EXIT_FAILURE', 'EXIT_OK', 'ScanResult',
    'cmd_analyze', 'cmd_export', 'cmd_scan', 'cmd_synth', 'collect_records',
    'expected_from_labels', 'load_histories', 'scan_records',
    'RPC_URL_ENV', 'RunConfig', 'load_run_config',
    'ConfigError',
    'DatasetAccount', 'GangEdgeRow', 'GangReportError', 'collect_accounts',
    'phishing_transactions', 'read_gang_report', 'write_dataset',
]
