#!/usr/bin/env python3
"""
SolPhish Toolkit - Main Entry Point

Scan accounts or fixtures for phishing transactions, analyze the
detections, export the dataset or generate a synthetic corpus.

Exit codes: 0 success, 1 failure, 2 scan found detections.
"""

import sys
import os
import argparse
import logging

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from solphish import __version__
from solphish.cli import (
    EXIT_FAILURE,
    ConfigError,
    cmd_analyze,
    cmd_export,
    cmd_scan,
    cmd_synth,
    load_run_config,
)
from solphish.synth import DEFAULT_COUNTS, DEFAULT_SEED

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'config',
                              'default_run.json')


def parse_counts(values):
    """--count label=n pairs merged over the default mix."""
    counts = {label.value: n for label, n in DEFAULT_COUNTS.items()}
    for value in values or []:
        label, sep, number = value.partition('=')
        if not sep:
            raise argparse.ArgumentTypeError(f"--count expects label=n, got {value!r}")
        try:
            counts[label] = int(number)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--count {label}: not an integer: {number!r}") from None
    return counts


def build_parser():
    parser = argparse.ArgumentParser(description='SolPhish phishing detection toolkit')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Log at DEBUG level on stderr (default: WARNING)'
    )
    parser.add_argument(
        '--config',
        type=str,
        default=None,
        help='Run config JSON file (default: config/default_run.json when present)'
    )
    parser.add_argument(
        '--out',
        type=str,
        default=None,
        help='Output directory (overrides the config file)'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    scan = sub.add_parser('scan', help='Scan an account, a transaction or a fixture file')
    target = scan.add_mutually_exclusive_group(required=True)
    target.add_argument('--account', type=str, help='Account address to crawl')
    target.add_argument('--tx', type=str, help='Transaction signature to fetch')
    target.add_argument('--fixture', type=str, help='JSON-lines file of raw records')
    scan.add_argument('--limit', type=int, default=1000,
                      help='Maximum signatures fetched for --account (default: 1000)')
    scan.add_argument('--rpc-url', type=str, default=None,
                      help='JSON-RPC endpoint (overrides SOLPHISH_RPC_URL and the config)')

    analyze = sub.add_parser('analyze', help='Run the analyses over a detections file')
    analyze.add_argument('--detections', type=str, required=True, help='detections.jsonl')
    analyze.add_argument('--histories', type=str, default=None,
                         help='Directory of JSON-lines account histories')
    analyze.add_argument('--labels', type=str, default=None,
                         help='Synthetic labels.json for precision and recall')
    analyze.add_argument('--plots', action='store_true', help='Also render PNG figures')

    export = sub.add_parser('export', help='Export the phishing dataset')
    export.add_argument('--detections', type=str, required=True, help='detections.jsonl')
    export.add_argument('--gangs', type=str, default=None, help='gangs.json from analyze')

    synth = sub.add_parser('synth', help='Generate a labeled synthetic corpus')
    synth.add_argument('--seed', type=int, default=DEFAULT_SEED,
                       help=f'Random seed (default: {DEFAULT_SEED})')
    synth.add_argument('--count', action='append', metavar='LABEL=N',
                       help='Transactions for one label; repeatable')
    return parser


def main(argv=None):
    """Main entry point for the toolkit"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )

    if args.command == 'synth':
        try:
            counts = parse_counts(args.count)
        except argparse.ArgumentTypeError as e:
            parser.error(str(e))
        return cmd_synth(args.seed, counts, args.out or 'corpus')

    config_path = args.config
    if config_path is None and os.path.exists(DEFAULT_CONFIG):
        config_path = DEFAULT_CONFIG
    overrides = {'output_dir': args.out, 'rpc_url': getattr(args, 'rpc_url', None)}
    try:
        config = load_run_config(config_path, overrides)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    if args.command == 'scan':
        return cmd_scan(config, account=args.account, signature=args.tx, fixture=args.fixture,
                        limit=args.limit)
    if args.command == 'analyze':
        return cmd_analyze(config, args.detections, args.histories, args.labels, plots=args.plots)
    return cmd_export(config, args.detections, args.gangs)


if __name__ == '__main__':
    sys.exit(main())
