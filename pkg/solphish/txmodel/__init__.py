"""
Transaction Model

Canonical representation of Solana transactions and the derived
quantities (balance deltas, drained assets, roles) the rules consume.
"""

from .address import Address, is_valid_address
from .errors import InvalidAddress, RoleUnderdetermined
from .programs import (
    COMPUTE_BUDGET_PROGRAM,
    LAMPORTS_PER_SOL,
    NATIVE_DECIMALS,
    NATIVE_LOADER,
    SYSTEM_PROGRAM,
    TOKEN_2022_PROGRAM,
    TOKEN_PROGRAM,
)
from .roles import Roles, RuleFamily, authorizer_of, derive_roles
from .transaction import (
    NATIVE_KEY,
    Asset,
    BalanceEntry,
    Instruction,
    InstructionKind,
    Transaction,
    drained_assets,
    holder_deltas,
    holder_outflows,
    involved_accounts,
    net_delta,
)

__all__ = [
    'Address', 'is_valid_address', 'InvalidAddress', 'RoleUnderdetermined',
    'COMPUTE_BUDGET_PROGRAM', 'LAMPORTS_PER_SOL', 'NATIVE_DECIMALS', 'NATIVE_LOADER',
    'SYSTEM_PROGRAM', 'TOKEN_2022_PROGRAM', 'TOKEN_PROGRAM',
    'Roles', 'RuleFamily', 'authorizer_of', 'derive_roles',
    'NATIVE_KEY', 'Asset', 'BalanceEntry', 'Instruction', 'InstructionKind', 'Transaction',
    'drained_assets', 'holder_deltas', 'holder_outflows', 'involved_accounts', 'net_delta',
]
