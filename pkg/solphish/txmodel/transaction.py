"""
Transaction Representation

Source-agnostic model of a parsed Solana transaction: typed
instructions at every depth, pre/post balance tables, signers and logs.
Every rule and analysis reads transactions through these types.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from .address import Address
from .programs import NATIVE_DECIMALS, SYSTEM_PROGRAM

NATIVE_KEY = 'NATIVE'


@dataclass(frozen=True)
class Asset:
    """
    Either native SOL (mint is None) or an SPL token identified by its mint.
    """
    mint: Optional[Address] = None

    @classmethod
    def native(cls) -> 'Asset':
        return cls(None)

    @classmethod
    def token(cls, mint: str) -> 'Asset':
        return cls(Address(mint))

    @classmethod
    def from_key(cls, key: str) -> 'Asset':
        """Inverse of Asset.key"""
        if key == NATIVE_KEY:
            return cls.native()
        return cls.token(key)

    @property
    def is_native(self) -> bool:
        return self.mint is None

    @property
    def key(self) -> str:
        """Stable string form: 'NATIVE' or the mint address."""
        return NATIVE_KEY if self.mint is None else str(self.mint)

    def __str__(self) -> str:
        return self.key


class InstructionKind(Enum):
    """Instruction types the rules distinguish"""
    TRANSFER = 'Transfer'
    ASSIGN = 'Assign'
    SET_AUTHORITY = 'SetAuthority'
    ADVANCE_NONCE = 'AdvanceNonce'
    CREATE_ACCOUNT = 'CreateAccount'
    OTHER = 'Other'


@dataclass(frozen=True)
class Instruction:
    """
    One instruction, top-level (depth 0) or inner/CPI (depth >= 1).

    For Assign, source is the reassigned account and new_authority the
    program it is assigned to. For SetAuthority, source is the account
    whose authority changes and authority the current holder.
    """
    program: Address
    kind: InstructionKind
    source: Optional[Address] = None
    destination: Optional[Address] = None
    amount: Optional[int] = None
    mint: Optional[Address] = None
    authority_type: Optional[str] = None
    new_authority: Optional[Address] = None
    authority: Optional[Address] = None
    depth: int = 0
    name: Optional[str] = None

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError(f"instruction depth must be >= 0, got {self.depth}")
        if self.amount is not None and self.amount < 0:
            raise ValueError(f"instruction amount must be unsigned, got {self.amount}")
        if self.kind is InstructionKind.TRANSFER:
            if self.source is None or self.destination is None or self.amount is None:
                raise ValueError('Transfer needs source, destination and amount')
        elif self.kind is InstructionKind.SET_AUTHORITY:
            if not self.authority_type:
                raise ValueError('SetAuthority needs authority_type')
        elif self.kind is InstructionKind.ASSIGN:
            if self.new_authority is None:
                raise ValueError('Assign needs new_authority')
        elif self.kind is InstructionKind.OTHER and not self.name:
            raise ValueError('Other instruction needs a name')

    @property
    def asset(self) -> Optional[Asset]:
        """Asset moved by a value-carrying instruction, if known."""
        if self.mint is not None:
            return Asset(self.mint)
        if self.program == SYSTEM_PROGRAM and self.amount is not None:
            return Asset.native()
        return None

    @property
    def label(self) -> str:
        if self.kind is InstructionKind.OTHER:
            return f"Other({self.name})"
        return self.kind.value

    @property
    def is_authority_change(self) -> bool:
        return self.kind in (InstructionKind.ASSIGN, InstructionKind.SET_AUTHORITY)


@dataclass(frozen=True)
class BalanceEntry:
    """
    Pre/post balance of one asset in one account, in raw base units.
    """
    account: Address
    asset: Asset
    pre: int
    post: int
    decimals: int
    owner: Optional[Address] = None

    def __post_init__(self):
        if self.pre < 0 or self.post < 0:
            raise ValueError(f"balances are unsigned base units: {self.pre}->{self.post}")
        if self.asset.is_native and self.decimals != NATIVE_DECIMALS:
            raise ValueError(f"native balance must carry {NATIVE_DECIMALS} decimals")

    @property
    def delta(self) -> int:
        return self.post - self.pre

    @property
    def drained(self) -> bool:
        """tb.balance_pre != 0 and tb.balance_after == 0"""
        return self.pre != 0 and self.post == 0

    @property
    def holder(self) -> Address:
        """Wallet that controls this balance: the owner if known, else the account."""
        return self.owner if self.owner is not None else self.account


@dataclass(frozen=True)
class Transaction:
    """
    Normalized Solana transaction.

    Instructions keep execution order, with inner instructions placed
    directly after their parent.
    """
    signature: str
    slot: int
    block_time: int
    instructions: Tuple[Instruction, ...]
    logs: Tuple[str, ...]
    balances: Tuple[BalanceEntry, ...]
    signers: Tuple[Address, ...]
    fee_payer: Address
    success: bool
    fee: int = 0
    recent_blockhash: Optional[str] = None

    def __post_init__(self):
        # Accept lists from builders but store tuples
        for name in ('instructions', 'logs', 'balances', 'signers'):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))
        if not self.signers:
            raise ValueError(f"transaction {self.signature} has no signers")
        if self.fee_payer != self.signers[0]:
            raise ValueError(f"transaction {self.signature}: fee payer must be the first signer")
        if self.fee < 0:
            raise ValueError(f"transaction {self.signature}: negative fee")

    def transfers(self) -> List[Instruction]:
        """Transfer instructions at every depth, in order."""
        return [ins for ins in self.instructions if ins.kind is InstructionKind.TRANSFER]

    def authority_changes(self) -> List[Instruction]:
        """Assign and SetAuthority instructions at every depth, in order."""
        return [ins for ins in self.instructions if ins.is_authority_change]

    def has_advance_nonce(self) -> bool:
        return any(ins.kind is InstructionKind.ADVANCE_NONCE for ins in self.instructions)

    def token_balances(self) -> List[BalanceEntry]:
        return [e for e in self.balances if not e.asset.is_native]

    def native_balances(self) -> List[BalanceEntry]:
        return [e for e in self.balances if e.asset.is_native]

    def entry_for(self, account: str, asset: Asset) -> Optional[BalanceEntry]:
        for entry in self.balances:
            if entry.account == account and entry.asset == asset:
                return entry
        return None

    def owner_of(self, account: str) -> Optional[Address]:
        """Owner recorded for a token account, if the balance table knows it."""
        for entry in self.balances:
            if entry.account == account and entry.owner is not None:
                return entry.owner
        return None

    def native_sum_matches_fee(self) -> bool:
        """Lamports are conserved apart from the fee."""
        return sum(e.delta for e in self.native_balances()) == -self.fee


def net_delta(tx: Transaction, account: str, asset: Asset) -> int:
    """
    Signed balance change of asset in account.

    Args:
        tx: Transaction to inspect
        account: Account address
        asset: Asset whose balance is read

    Returns:
        post - pre of the matching entry, or 0 if there is none
    """
    entry = tx.entry_for(account, asset)
    return entry.delta if entry is not None else 0


def drained_assets(tx: Transaction) -> List[Tuple[Address, Asset]]:
    """
    Every (account, asset) whose balance went from non-zero to exactly zero,
    in balance-table order.
    """
    return [(e.account, e.asset) for e in tx.balances if e.drained]


def holder_deltas(tx: Transaction) -> Dict[Address, Dict[str, List[int]]]:
    """Per-entry deltas grouped by holder and asset key; zero deltas omitted."""
    grouped: Dict[Address, Dict[str, List[int]]] = {}
    for entry in tx.balances:
        if entry.delta == 0:
            continue
        grouped.setdefault(entry.holder, {}).setdefault(entry.asset.key, []).append(entry.delta)
    return grouped


def holder_outflows(tx: Transaction, holder: str) -> List[Tuple[BalanceEntry, int]]:
    """
    Base units leaving each balance held by holder, fee excluded.

    The fee payer's native entry is debited the fee as well; only the
    remainder counts as an outflow.

    Returns:
        (entry, amount) pairs with amount > 0, in balance-table order
    """
    outflows = []
    for entry in tx.balances:
        if entry.holder != holder or entry.delta >= 0:
            continue
        amount = -entry.delta
        if entry.asset.is_native and entry.account == tx.fee_payer:
            amount -= tx.fee
        if amount > 0:
            outflows.append((entry, amount))
    return outflows


def involved_accounts(tx: Transaction) -> Set[Address]:
    """
    Every address a transaction touches: signers, balance accounts and
    owners, instruction endpoints and invoked programs.
    """
    involved: Set[Address] = set(tx.signers)
    for entry in tx.balances:
        involved.add(entry.account)
        if entry.owner is not None:
            involved.add(entry.owner)
    for ins in tx.instructions:
        involved.add(ins.program)
        for value in (ins.source, ins.destination, ins.new_authority, ins.authority):
            if value is not None:
                involved.add(value)
    return involved
