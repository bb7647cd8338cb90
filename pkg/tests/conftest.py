"""
Shared test builders: deterministic addresses, hand-made transactions,
an instrumented fake JSON-RPC endpoint and run configs pointing at the
shipped list files.
"""

import hashlib
import os
import threading
import time
from collections import Counter

import base58
import pytest

from solphish.cli import RunConfig
from solphish.rules import RuleSet, load_market_list
from solphish.synth import generate_corpus
from solphish.txmodel import (
    NATIVE_DECIMALS,
    SYSTEM_PROGRAM,
    TOKEN_PROGRAM,
    Address,
    Asset,
    BalanceEntry,
    Instruction,
    InstructionKind,
    Transaction,
)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES_DIR = os.path.join(REPO_ROOT, 'fixtures', 'real')
CONFIG_DIR = os.path.join(REPO_ROOT, 'config')

STMT_FIXTURE = os.path.join(FIXTURES_DIR, 'stmt_gck5_drain.jsonl')
AAT_FIXTURE = os.path.join(FIXTURES_DIR, 'aat_bnrt.jsonl')
FUND_TRANSFER_FIXTURE = os.path.join(FIXTURES_DIR, 'fund_transfer_43MVsw.jsonl')
JITO_FIXTURE = os.path.join(FIXTURES_DIR, 'jito_router_assign.jsonl')

MARKETS_FILE = os.path.join(CONFIG_DIR, 'markets.json')
ALLOWLIST_FILE = os.path.join(CONFIG_DIR, 'official_allowlist.txt')
BENIGN_FILE = os.path.join(CONFIG_DIR, 'benign_programs.txt')
PRICES_FILE = os.path.join(CONFIG_DIR, 'prices.example.json')

USDC = 'EPjFWdd5AufqSSqeM2qN1xzybapC8G4wEGGkZwyTDt1v'
USDT = 'Es9vMFrzaCERmJfrF4H2FYD4KCoNkY11McCe8BenwNYB'
BONK = 'DezXAZ8z7PnrnRJjz3wXBoRgixCa6xjnB7YaB1pPB263'

JULY_1_2024 = 1719792000


def addr(label: str) -> Address:
    """Stable address derived from a label."""
    return Address(base58.b58encode(hashlib.sha256(label.encode()).digest()).decode('ascii'))


def sig(label: str) -> str:
    return base58.b58encode(hashlib.sha512(label.encode()).digest()).decode('ascii')


def native(account: str, pre: int, post: int) -> BalanceEntry:
    return BalanceEntry(Address(account), Asset.native(), pre, post, NATIVE_DECIMALS)


def token(account: str, mint: str, owner: str, pre: int, post: int,
          decimals: int = 6) -> BalanceEntry:
    return BalanceEntry(Address(account), Asset.token(mint), pre, post, decimals, Address(owner))


def sol_transfer(source: str, destination: str, lamports: int, depth: int = 0) -> Instruction:
    return Instruction(SYSTEM_PROGRAM, InstructionKind.TRANSFER, source=Address(source),
                       destination=Address(destination), amount=lamports, depth=depth)


def token_transfer(source: str, destination: str, amount: int, mint: str,
                   depth: int = 0) -> Instruction:
    return Instruction(TOKEN_PROGRAM, InstructionKind.TRANSFER, source=Address(source),
                       destination=Address(destination), amount=amount, mint=Address(mint),
                       depth=depth)


def assign(account: str, program: str, depth: int = 0) -> Instruction:
    return Instruction(SYSTEM_PROGRAM, InstructionKind.ASSIGN, source=Address(account),
                       new_authority=Address(program), depth=depth)


def set_owner(account: str, new_owner: str, authority: str, authority_type: str = 'accountowner',
              depth: int = 0) -> Instruction:
    return Instruction(TOKEN_PROGRAM, InstructionKind.SET_AUTHORITY, source=Address(account),
                       authority_type=authority_type, new_authority=Address(new_owner),
                       authority=Address(authority), depth=depth)


def make_tx(instructions, balances, signers, signature=None, block_time=JULY_1_2024,
            logs=(), success=True, fee=0, slot=270_000_000) -> Transaction:
    signers = [Address(s) for s in signers]
    return Transaction(
        signature=signature or sig(f"{block_time}-{len(instructions)}-{signers[0]}"),
        slot=slot,
        block_time=block_time,
        instructions=list(instructions),
        logs=list(logs),
        balances=list(balances),
        signers=signers,
        fee_payer=signers[0],
        success=success,
        fee=fee,
    )


def stmt_drain(victim: str, phisher: str, block_time: int = JULY_1_2024,
               label: str = 'drain') -> Transaction:
    """Victim loses USDC, USDT and 1 SOL to phisher in three transfers."""
    victim_usdc, victim_usdt = addr(f"{label}-vu"), addr(f"{label}-vt")
    phisher_usdc, phisher_usdt = addr(f"{label}-pu"), addr(f"{label}-pt")
    return make_tx(
        [token_transfer(victim_usdc, phisher_usdc, 100_000_000, USDC),
         token_transfer(victim_usdt, phisher_usdt, 40_000_000, USDT),
         sol_transfer(victim, phisher, 1_000_000_000)],
        [native(victim, 3_000_000_000, 2_000_000_000),
         native(phisher, 0, 1_000_000_000),
         token(victim_usdc, USDC, victim, 100_000_000, 0),
         token(phisher_usdc, USDC, phisher, 0, 100_000_000),
         token(victim_usdt, USDT, victim, 40_000_000, 0),
         token(phisher_usdt, USDT, phisher, 0, 40_000_000)],
        [victim],
        signature=sig(label),
        block_time=block_time,
    )


class FakeResponse:
    """The parts of requests.Response the RPC client reads."""

    def __init__(self, status_code=200, body=None, headers=None):
        self.status_code = status_code
        self.headers = headers or {}
        self._body = body

    def json(self):
        return self._body


def rpc_error(code: int, message: str = 'error') -> FakeResponse:
    return FakeResponse(body={'jsonrpc': '2.0', 'id': 0, 'error': {'code': code, 'message': message}})


class FakeEndpoint:
    """
    Instrumented stand-in for a JSON-RPC node, passed to RpcClient as its
    session.

    Serves getTransaction from a signature -> payload map and
    getSignaturesForAddress from an account -> signatures map (newest
    first). Queued failures are answered first, one per request.
    """

    def __init__(self, transactions=None, signatures=None, failures=None, delay=0.002):
        self.transactions = dict(transactions or {})
        self.signatures = dict(signatures or {})
        self.failures = list(failures or [])
        self.delay = delay
        self.calls = Counter()
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()

    @property
    def total_calls(self) -> int:
        return sum(self.calls.values())

    def post(self, url, json=None, timeout=None):
        with self._lock:
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
            self.calls[json['method']] += 1
            failure = self.failures.pop(0) if self.failures else None
        try:
            time.sleep(self.delay)
            if failure is not None:
                return failure
            result = self._result(json['method'], json['params'])
            return FakeResponse(body={'jsonrpc': '2.0', 'id': json['id'], 'result': result})
        finally:
            with self._lock:
                self.in_flight -= 1

    def _result(self, method, params):
        if method == 'getTransaction':
            return self.transactions.get(params[0])
        if method == 'getSignaturesForAddress':
            account, options = params
            history = self.signatures.get(account, [])
            before = options.get('before')
            if before is not None:
                history = history[history.index(before) + 1:]
            return [{'signature': s, 'err': None} for s in history[:options['limit']]]
        raise AssertionError(f"unexpected method {method}")


@pytest.fixture
def run_config(tmp_path):
    """RunConfig using the shipped list files and writing under tmp_path."""
    return RunConfig(
        markets_path=MARKETS_FILE,
        official_allowlist_path=ALLOWLIST_FILE,
        benign_programs_path=BENIGN_FILE,
        prices_path=PRICES_FILE,
        output_dir=str(tmp_path / 'out'),
        cache_dir=str(tmp_path / 'cache'),
    )


@pytest.fixture(scope='session')
def ruleset():
    """Shipped market list, default allowlist, no benign programs."""
    return RuleSet(markets=load_market_list(MARKETS_FILE))


@pytest.fixture(scope='session')
def corpus():
    """The default seed-42 labeled corpus, generated once per session."""
    return generate_corpus(seed=42)
