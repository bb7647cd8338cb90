"""
SolPhish Toolkit

Detects Solana phishing transactions (multi-transfer drains, account
authority transfers and system-account impersonation) and runs the
downstream loss, lifecycle and gang analyses.
"""

from .errors import SolPhishError

__version__ = '1.0.0'

__all__ = ['SolPhishError', '__version__']
